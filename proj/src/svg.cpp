#include "survhc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace survhc {

namespace {

constexpr double width = 640, height = 420;
constexpr double left = 60, right = 20, top = 40, bottom = 50;
constexpr double plot_w = width - left - right;
constexpr double plot_h = height - top - bottom;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void header(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
}

void axes(std::ostringstream& out, const std::string& xlabel, const std::string& ylabel) {
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
        << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 12) << "\" text-anchor=\"middle\">"
        << escape(xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(top + plot_h / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace

std::string km_svg(const IntervalTable& table, const KaplanMeierCurve& curve,
                   const std::vector<std::size_t>& highlighted, const std::string& title) {
    const auto T = table.intervals();
    std::ostringstream out;
    header(out, title);
    const double dx = T ? plot_w / static_cast<double>(T) : plot_w;
    auto px = [&](double t) { return left + t * dx; };
    auto py = [&](double s) { return top + (1.0 - s) * plot_h; };

    for (auto t : highlighted) {
        out << "<rect class=\"delta\" data-t=\"" << t + 1 << "\" x=\"" << num(px(static_cast<double>(t))) << "\" y=\""
            << num(top) << "\" width=\"" << num(dx) << "\" height=\"" << num(plot_h)
            << "\" fill=\"#bbbbbb\" fill-opacity=\"0.6\"/>\n";
    }
    axes(out, "t (interval)", "survival proportion");

    auto path = [&](const std::vector<double>& s, const char* color, const char* name) {
        out << "<path class=\"km-" << name << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\"M"
            << num(px(0)) << ',' << num(py(1.0));
        double prev = 1.0;
        for (std::size_t t = 0; t < s.size(); ++t) {
            out << " L" << num(px(static_cast<double>(t + 1))) << ',' << num(py(prev));
            out << " L" << num(px(static_cast<double>(t + 1))) << ',' << num(py(s[t]));
            prev = s[t];
        }
        out << "\"/>\n";
    };
    path(curve.s_x, "#1f77b4", "x");
    path(curve.s_y, "#d62728", "y");

    auto ticks = [&](const std::vector<std::int64_t>& c, const std::vector<double>& s, const char* color,
                     const char* name) {
        for (std::size_t t = 0; t < c.size(); ++t) {
            if (c[t] == 0) continue;
            out << "<text class=\"censor-" << name << "\" data-t=\"" << t + 1 << "\" x=\""
                << num(px(static_cast<double>(t + 1))) << "\" y=\"" << num(py(s[t]) + 4)
                << "\" text-anchor=\"middle\" fill=\"" << color << "\">+</text>\n";
        }
    };
    ticks(table.c_x, curve.s_x, "#1f77b4", "x");
    ticks(table.c_y, curve.s_y, "#d62728", "y");

    out << "<text x=\"" << num(left + plot_w - 60) << "\" y=\"" << num(top + 16) << "\" fill=\"#1f77b4\">group x</text>\n";
    out << "<text x=\"" << num(left + plot_w - 60) << "\" y=\"" << num(top + 32) << "\" fill=\"#d62728\">group y</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string heatmap_svg(const PowerGrid& grid, const std::vector<TransitionPoint>& curve, const std::string& title) {
    const auto nb = grid.beta_grid.size(), nr = grid.r_grid.size();
    std::ostringstream out;
    header(out, title);

    const double cw = plot_w / static_cast<double>(nb), ch = plot_h / static_cast<double>(nr);
    const double b_lo = grid.beta_grid.front(), b_hi = grid.beta_grid.back();
    const double r_lo = grid.r_grid.front(), r_hi = grid.r_grid.back();
    // Cell centers map linearly onto the grid values.
    auto bx = [&](double b) {
        return nb == 1 ? left + plot_w / 2 : left + cw / 2 + (b - b_lo) / (b_hi - b_lo) * (plot_w - cw);
    };
    auto ry = [&](double r) {
        return nr == 1 ? top + plot_h / 2 : top + plot_h - ch / 2 - (r - r_lo) / (r_hi - r_lo) * (plot_h - ch);
    };

    for (std::size_t bi = 0; bi < nb; ++bi) {
        for (std::size_t ri = 0; ri < nr; ++ri) {
            const double p = grid.at(bi, ri).power();
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - p)));
            out << "<rect x=\"" << num(left + static_cast<double>(bi) * cw) << "\" y=\""
                << num(top + plot_h - static_cast<double>(ri + 1) * ch) << "\" width=\"" << num(cw) << "\" height=\""
                << num(ch) << "\" fill=\"rgb(255," << shade << ',' << shade << ")\"><title>beta="
                << format_real(grid.beta_grid[bi]) << " r=" << format_real(grid.r_grid[ri])
                << " power=" << format_real(p) << "</title></rect>\n";
        }
    }
    axes(out, "beta (rarity)", "r (intensity)");

    if (nb > 1) {
        out << "<polyline class=\"rho-theory\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
        constexpr int steps = 200;
        for (int i = 0; i <= steps; ++i) {
            const double b = b_lo + (b_hi - b_lo) * i / steps;
            const double r = std::clamp(rho_theory(b), r_lo, r_hi);
            out << (i ? " " : "") << num(bx(b)) << ',' << num(ry(r));
        }
        out << "\"/>\n";
    }
    for (const auto& p : curve) {
        if (!p.rho) continue;
        const double r = std::clamp(*p.rho, r_lo, r_hi);
        out << "<circle class=\"rho-hat\" cx=\"" << num(bx(p.beta)) << "\" cy=\"" << num(ry(r))
            << "\" r=\"4\" fill=\"none\" stroke=\"blue\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace survhc
