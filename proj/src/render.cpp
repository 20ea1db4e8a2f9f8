#include "weavesim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace weave {

namespace {

void appendf(std::string& out, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out += buf;
}

}  // namespace

std::string density_csv(const DensityMap& map) {
    std::string out;
    appendf(out, "# density origin_m=%.4f bin_m=%.4f steps=%d bins=%d\n", map.origin_m,
            map.bin_m, map.steps, map.bins);
    out += "step";
    for (int b = 0; b < map.bins; ++b) appendf(out, ",bin%d", b);
    out += '\n';
    for (int s = 0; s < map.steps; ++s) {
        appendf(out, "%d", s);
        for (int b = 0; b < map.bins; ++b) appendf(out, ",%d", map.at(s, b));
        out += '\n';
    }
    return out;
}

DensityMap density_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    DensityMap map;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# density origin_m=%lf bin_m=%lf steps=%d bins=%d",
                    &map.origin_m, &map.bin_m, &map.steps, &map.bins) != 4)
        throw DataError("density csv: missing metadata line");
    if (!std::getline(in, line)) throw DataError("density csv: missing header");
    map.counts.assign(static_cast<std::size_t>(map.steps) * map.bins, 0);
    for (int s = 0; s < map.steps; ++s) {
        if (!std::getline(in, line)) throw DataError("density csv: truncated");
        std::istringstream ls(line);
        std::string field;
        std::getline(ls, field, ',');  // step index
        for (int b = 0; b < map.bins; ++b) {
            if (!std::getline(ls, field, ',')) throw DataError("density csv: short row");
            map.counts[static_cast<std::size_t>(s) * map.bins + b] = std::stoi(field);
        }
    }
    return map;
}

namespace {

constexpr double kMarginLeft = 48.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 36.0;
constexpr double kMarginRight = 16.0;

std::string svg_header(double width, double height, const std::string& title) {
    std::string out;
    appendf(out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
            "viewBox=\"0 0 %.0f %.0f\">\n",
            width, height, width, height);
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    appendf(out, "<text x=\"%.1f\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
            kMarginLeft, title.c_str());
    return out;
}

void speed_color(double t01, int& r, int& g, int& b) {
    // red (slow) -> yellow -> green (fast)
    const double t = std::clamp(t01, 0.0, 1.0);
    if (t < 0.5) {
        const double u = t / 0.5;
        r = 214;
        g = static_cast<int>(40 + u * (190 - 40));
        b = 40;
    } else {
        const double u = (t - 0.5) / 0.5;
        r = static_cast<int>(214 - u * (214 - 32));
        g = static_cast<int>(190 - u * (190 - 160));
        b = static_cast<int>(40 + u * (70 - 40));
    }
}

}  // namespace

std::string density_svg(const DensityMap& map, double dt) {
    const double plot_w = 480.0, plot_h = 520.0;
    const double width = kMarginLeft + plot_w + kMarginRight;
    const double height = kMarginTop + plot_h + kMarginBottom;
    std::string out = svg_header(width, height, "Traffic density (lighter = denser)");

    int max_count = 1;
    for (int c : map.counts) max_count = std::max(max_count, c);

    if (map.steps > 0 && map.bins > 0) {
        const double cw = plot_w / map.bins;
        const double rh = plot_h / map.steps;
        for (int s = 0; s < map.steps; ++s) {
            int b = 0;
            while (b < map.bins) {
                const int value = map.at(s, b);
                int run = 1;
                while (b + run < map.bins && map.at(s, b + run) == value) ++run;
                if (value > 0) {
                    const int shade =
                        40 + static_cast<int>(215.0 * value / max_count);  // darker = emptier
                    appendf(out,
                            "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                            "fill=\"#%02x%02x%02x\"/>\n",
                            kMarginLeft + b * cw, kMarginTop + s * rh, run * cw, rh + 0.5,
                            shade, shade, shade);
                }
                b += run;
            }
        }
    }

    // frame and axis labels
    appendf(out,
            "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
            "stroke=\"black\"/>\n",
            kMarginLeft, kMarginTop, plot_w, plot_h);
    for (int i = 0; i <= 4; ++i) {
        const double x = kMarginLeft + plot_w * i / 4.0;
        const double pos = map.origin_m + (map.bins * map.bin_m) * i / 4.0;
        appendf(out,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                "text-anchor=\"middle\">%.0f</text>\n",
                x, kMarginTop + plot_h + 14.0, pos);
        const double y = kMarginTop + plot_h * i / 4.0;
        appendf(out,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                "text-anchor=\"end\">%.0f</text>\n",
                kMarginLeft - 4.0, y + 3.0, map.steps * dt * i / 4.0);
    }
    appendf(out,
            "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">distance "
            "(m)</text>\n",
            kMarginLeft + plot_w / 2.0 - 30.0, kMarginTop + plot_h + 30.0);
    appendf(out,
            "<text x=\"12\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
            "transform=\"rotate(-90 12 %.1f)\">time (s)</text>\n",
            kMarginTop + plot_h / 2.0, kMarginTop + plot_h / 2.0);
    out += "</svg>\n";
    return out;
}

std::string trajectories_svg(const EpisodeLog& log, const RoadNetwork& road) {
    const double plot_w = 480.0, plot_h = 520.0;
    const double width = kMarginLeft + plot_w + kMarginRight;
    const double height = kMarginTop + plot_h + kMarginBottom;
    std::string out = svg_header(width, height, "Vehicle trajectories (green fast, red slow)");

    const double x0 = road.control_zone_begin();
    const double x1 = road.control_zone_end();
    const double t_end = std::max(1, log.episode_steps) * log.dt;

    std::map<VehicleId, std::vector<const LogRow*>> by_vehicle;
    for (const auto& r : log.rows) by_vehicle[r.id].push_back(&r);

    auto px = [&](double pos) { return kMarginLeft + (pos - x0) / (x1 - x0) * plot_w; };
    auto py = [&](double t) { return kMarginTop + t / t_end * plot_h; };

    for (const auto& [id, rows] : by_vehicle) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const LogRow& a = *rows[i - 1];
            const LogRow& b = *rows[i];
            if (b.step != a.step + 1) continue;
            if (a.pos < x0 || b.pos < x0 || a.pos > x1 || b.pos > x1) continue;
            int r, g, bl;
            speed_color(b.speed / road.freeway_speed_limit, r, g, bl);
            appendf(out,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"#%02x%02x%02x\" stroke-width=\"0.8\"/>\n",
                    px(a.pos), py(log.time_of(a)), px(b.pos), py(log.time_of(b)), r, g, bl);
        }
    }

    appendf(out,
            "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
            "stroke=\"black\"/>\n",
            kMarginLeft, kMarginTop, plot_w, plot_h);
    for (int i = 0; i <= 4; ++i) {
        const double x = kMarginLeft + plot_w * i / 4.0;
        appendf(out,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                "text-anchor=\"middle\">%.0f</text>\n",
                x, kMarginTop + plot_h + 14.0, x0 + (x1 - x0) * i / 4.0);
        const double y = kMarginTop + plot_h * i / 4.0;
        appendf(out,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                "text-anchor=\"end\">%.0f</text>\n",
                kMarginLeft - 4.0, y + 3.0, t_end * i / 4.0);
    }
    appendf(out,
            "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">distance "
            "(m)</text>\n",
            kMarginLeft + plot_w / 2.0 - 30.0, kMarginTop + plot_h + 30.0);
    appendf(out,
            "<text x=\"12\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
            "transform=\"rotate(-90 12 %.1f)\">time (s)</text>\n",
            kMarginTop + plot_h / 2.0, kMarginTop + plot_h / 2.0);
    out += "</svg>\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace weave
