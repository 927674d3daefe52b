#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spikeservo/arm.hpp"
#include "spikeservo/network.hpp"

namespace spikeservo {

// Small self-contained SVG writer for the experiment plots. Axes are linear
// with a fixed margin; styling is deliberately plain.
class SvgPlot {
public:
    SvgPlot(double width = 640.0, double height = 480.0)
        : w_(width), h_(height)
    {
    }

    void add_polyline(const std::vector<Vec2>& pts, const std::string& color,
                      double stroke = 1.5, bool dashed = false)
    {
        if (pts.empty()) return;
        for (const auto& p : pts) grow(p);
        lines_.push_back({pts, color, stroke, dashed});
    }

    void add_points(const std::vector<Vec2>& pts, const std::string& color,
                    double radius = 2.0)
    {
        if (pts.empty()) return;
        for (const auto& p : pts) grow(p);
        dots_.push_back({pts, color, radius});
    }

    void set_title(const std::string& t) { title_ = t; }
    void set_labels(const std::string& x, const std::string& y)
    {
        xlabel_ = x;
        ylabel_ = y;
    }

    void write(std::ostream& os) const
    {
        const double ml = 60.0, mr = 20.0, mt = 34.0, mb = 44.0;
        double lo_x = lo_[0], hi_x = hi_[0], lo_y = lo_[1], hi_y = hi_[1];
        if (!(hi_x > lo_x)) hi_x = lo_x + 1.0;
        if (!(hi_y > lo_y)) hi_y = lo_y + 1.0;
        const double pad_x = 0.05 * (hi_x - lo_x);
        const double pad_y = 0.05 * (hi_y - lo_y);
        lo_x -= pad_x;
        hi_x += pad_x;
        lo_y -= pad_y;
        hi_y += pad_y;
        auto px = [&](double x) {
            return ml + (x - lo_x) / (hi_x - lo_x) * (w_ - ml - mr);
        };
        auto py = [&](double y) {
            return h_ - mb - (y - lo_y) / (hi_y - lo_y) * (h_ - mt - mb);
        };

        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
           << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << ' ' << h_
           << "\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
           << w_ - ml - mr << "\" height=\"" << h_ - mt - mb
           << "\" fill=\"none\" stroke=\"#888\"/>\n";

        // four tick labels per axis
        for (int i = 0; i <= 3; ++i) {
            const double fx = lo_x + (hi_x - lo_x) * i / 3.0;
            const double fy = lo_y + (hi_y - lo_y) * i / 3.0;
            os << "<text x=\"" << px(fx) << "\" y=\"" << h_ - mb + 16.0
               << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx)
               << "</text>\n";
            os << "<text x=\"" << ml - 6.0 << "\" y=\"" << py(fy) + 4.0
               << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy)
               << "</text>\n";
        }
        if (!title_.empty()) {
            os << "<text x=\"" << w_ / 2.0
               << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
               << title_ << "</text>\n";
        }
        if (!xlabel_.empty()) {
            os << "<text x=\"" << w_ / 2.0 << "\" y=\"" << h_ - 8.0
               << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel_
               << "</text>\n";
        }
        if (!ylabel_.empty()) {
            os << "<text x=\"14\" y=\"" << h_ / 2.0
               << "\" font-size=\"12\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 14 "
               << h_ / 2.0 << ")\">" << ylabel_ << "</text>\n";
        }

        for (const auto& l : lines_) {
            os << "<polyline fill=\"none\" stroke=\"" << l.color
               << "\" stroke-width=\"" << l.stroke << "\"";
            if (l.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (const auto& p : l.pts) {
                os << px(p[0]) << ',' << py(p[1]) << ' ';
            }
            os << "\"/>\n";
        }
        for (const auto& d : dots_) {
            for (const auto& p : d.pts) {
                os << "<circle cx=\"" << px(p[0]) << "\" cy=\"" << py(p[1])
                   << "\" r=\"" << d.radius << "\" fill=\"" << d.color
                   << "\"/>\n";
            }
        }
        os << "</svg>\n";
    }

private:
    struct Line {
        std::vector<Vec2> pts;
        std::string color;
        double stroke;
        bool dashed;
    };
    struct Dots {
        std::vector<Vec2> pts;
        std::string color;
        double radius;
    };

    static std::string fmt(double v)
    {
        std::ostringstream ss;
        ss.precision(3);
        ss << v;
        return ss.str();
    }

    void grow(const Vec2& p)
    {
        lo_[0] = std::min(lo_[0], p[0]);
        lo_[1] = std::min(lo_[1], p[1]);
        hi_[0] = std::max(hi_[0], p[0]);
        hi_[1] = std::max(hi_[1], p[1]);
    }

    double w_, h_;
    Vec2 lo_{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec2 hi_{-std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};
    std::vector<Line> lines_;
    std::vector<Dots> dots_;
    std::string title_, xlabel_, ylabel_;
};

inline std::vector<Vec2> series_points(const std::vector<double>& ys,
                                       double x_step = 1.0)
{
    std::vector<Vec2> out;
    out.reserve(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        out.push_back({i * x_step, ys[i]});
    }
    return out;
}

// Spike raster for one population: x = time, y = neuron index.
inline std::vector<Vec2> raster_points(const SpikeRecord& rec, int pop)
{
    std::vector<Vec2> out;
    for (const auto& [n, t] : rec.spikes.at(pop)) {
        out.push_back({t, double(n)});
    }
    return out;
}

}  // namespace spikeservo
