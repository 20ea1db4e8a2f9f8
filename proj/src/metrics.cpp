#include "weavesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "weavesim/errors.hpp"

namespace weave {

namespace {

constexpr double kMetersPerMile = 1609.344;
constexpr double kMlPerGallon = 3785.411784;
constexpr double kStopEnterSpeed = 0.3;  // m/s
constexpr double kStopRearmSpeed = 2.0;  // m/s

struct VehicleTally {
    double spawn_time = -1.0;
    double exit_time = -1.0;
    double sum_speed = 0.0;
    long samples = 0;
    double distance_m = 0.0;
    double fuel_ml = 0.0;
    double co2_mg = 0.0;
    double nox_mg = 0.0;
    int stops = 0;
    bool armed = false;
    bool exited = false;
};

}  // namespace

double emission_rate(double speed, double accel, const PolyCoeffs& c) {
    const double v = speed;
    const double a = accel;
    const double demand = c[0] + c[1] * v * a + c[2] * v * a * a + c[3] * v + c[4] * v * v +
                          c[5] * v * v * v;
    return std::max(0.0, demand);
}

MetricsRecord compute_metrics(const EpisodeLog& log, const EmissionCoefficients& coeffs) {
    MetricsRecord rec;
    if (log.rows.empty()) {
        rec.empty = true;
        return rec;
    }

    std::map<VehicleId, VehicleTally> tally;
    for (const auto& r : log.rows) {
        VehicleTally& t = tally[r.id];
        const double time = log.time_of(r);
        if (t.spawn_time < 0.0) t.spawn_time = time - log.dt;
        t.sum_speed += r.speed;
        ++t.samples;
        t.distance_m += r.speed * log.dt;
        t.fuel_ml += emission_rate(r.speed, r.accel, coeffs.fuel) * log.dt;
        t.co2_mg += emission_rate(r.speed, r.accel, coeffs.co2) * log.dt;
        t.nox_mg += emission_rate(r.speed, r.accel, coeffs.nox) * log.dt;
        if (r.speed >= kStopRearmSpeed) t.armed = true;
        else if (r.speed < kStopEnterSpeed && t.armed) {
            ++t.stops;
            t.armed = false;
        }
        if (r.flags & kEventExited) {
            t.exited = true;
            t.exit_time = time;
        }
    }

    const double duration_s = log.episode_steps * log.dt;
    long exits = 0;
    double travel_sum = 0.0;
    double speed_sum = 0.0, stops_sum = 0.0, mpg_sum = 0.0, co2_sum = 0.0, nox_sum = 0.0;
    long mpg_n = 0, emis_n = 0;
    for (const auto& [id, t] : tally) {
        if (t.exited) {
            ++exits;
            travel_sum += t.exit_time - t.spawn_time;
        }
        speed_sum += t.sum_speed / t.samples;
        stops_sum += t.stops;
        const double miles = t.distance_m / kMetersPerMile;
        if (t.fuel_ml > 0.0 && miles > 0.0) {
            mpg_sum += miles / (t.fuel_ml / kMlPerGallon);
            ++mpg_n;
        }
        if (miles > 0.0) {
            co2_sum += t.co2_mg / 1000.0 / miles;
            nox_sum += t.nox_mg / miles;
            ++emis_n;
        }
    }
    const double n_vehicles = static_cast<double>(tally.size());
    rec.throughput_vph = duration_s > 0.0 ? exits * 3600.0 / duration_s : 0.0;
    rec.mean_speed_mps = speed_sum / n_vehicles;
    rec.mean_travel_time_s = exits > 0 ? travel_sum / exits : 0.0;
    rec.stops_per_vehicle = stops_sum / n_vehicles;
    rec.fuel_efficiency_mpg = mpg_n > 0 ? mpg_sum / mpg_n : 0.0;
    rec.co2_g_per_mi = emis_n > 0 ? co2_sum / emis_n : 0.0;
    rec.nox_mg_per_mi = emis_n > 0 ? nox_sum / emis_n : 0.0;
    return rec;
}

int DensityMap::row_sum(int step) const {
    int n = 0;
    for (int b = 0; b < bins; ++b) n += at(step, b);
    return n;
}

DensityMap density_map(const EpisodeLog& log, const RoadNetwork& road, double bin_m) {
    const double begin = road.control_zone_begin();
    const double end = road.control_zone_end();
    const double length = end - begin;
    const double ratio = length / bin_m;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw DomainError("density_map: bin size must divide the control-area length");

    DensityMap map;
    map.origin_m = begin;
    map.bin_m = bin_m;
    map.steps = log.episode_steps;
    map.bins = static_cast<int>(std::round(ratio));
    map.counts.assign(static_cast<std::size_t>(map.steps) * map.bins, 0);
    for (const auto& r : log.rows) {
        if (r.flags & kEventExited) continue;  // off the roadway
        if (r.pos < begin || r.pos >= end) continue;
        const int bin = static_cast<int>((r.pos - begin) / bin_m);
        ++map.counts[static_cast<std::size_t>(r.step) * map.bins + bin];
    }
    return map;
}

AggregateStats aggregate_metrics(const std::vector<MetricsRecord>& records) {
    AggregateStats agg;
    agg.count = static_cast<int>(records.size());
    if (records.empty()) return agg;

    auto fields = [](MetricsRecord& r) {
        return std::array<double*, 7>{&r.throughput_vph,     &r.mean_speed_mps,
                                      &r.mean_travel_time_s, &r.stops_per_vehicle,
                                      &r.fuel_efficiency_mpg, &r.co2_g_per_mi,
                                      &r.nox_mg_per_mi};
    };
    auto cfields = [](const MetricsRecord& r) {
        return std::array<const double*, 7>{&r.throughput_vph,     &r.mean_speed_mps,
                                            &r.mean_travel_time_s, &r.stops_per_vehicle,
                                            &r.fuel_efficiency_mpg, &r.co2_g_per_mi,
                                            &r.nox_mg_per_mi};
    };

    auto mean_ptr = fields(agg.mean);
    for (const auto& r : records) {
        auto src = cfields(r);
        for (std::size_t i = 0; i < src.size(); ++i) *mean_ptr[i] += *src[i];
    }
    for (auto* p : mean_ptr) *p /= agg.count;

    if (agg.count > 1) {
        auto std_ptr = fields(agg.stddev);
        for (const auto& r : records) {
            auto src = cfields(r);
            auto m = cfields(agg.mean);
            for (std::size_t i = 0; i < src.size(); ++i) {
                const double d = *src[i] - *m[i];
                *std_ptr[i] += d * d;
            }
        }
        for (auto* p : std_ptr) *p = std::sqrt(*p / (agg.count - 1));
    }
    return agg;
}

namespace {

const char* kMetricNames[7] = {
    "Traffic throughput (vph)",
    "Average vehicle speed (m/s)",
    "Average travel time (sec)",
    "Average number of stops per vehicle",
    "Average vehicle fuel efficiency (mpg)",
    "Average CO2 emissions per vehicle (g/mi)",
    "Average NOx emissions per vehicle (mg/mi)",
};

std::array<double, 7> metric_values(const MetricsRecord& r) {
    return {r.throughput_vph,      r.mean_speed_mps,  r.mean_travel_time_s,
            r.stops_per_vehicle,   r.fuel_efficiency_mpg, r.co2_g_per_mi,
            r.nox_mg_per_mi};
}

}  // namespace

ComparisonTable build_comparison(const std::map<int, std::vector<MetricsRecord>>& baseline,
                                 const std::map<int, std::vector<MetricsRecord>>& rl) {
    if (baseline.empty()) throw StructuralError("build_comparison: no baseline runs");
    for (const auto& [inflow, recs] : baseline)
        if (!rl.count(inflow))
            throw StructuralError("build_comparison: no RL run for inflow " +
                                  std::to_string(inflow));
    for (const auto& [inflow, recs] : rl)
        if (!baseline.count(inflow))
            throw StructuralError("build_comparison: no baseline run for inflow " +
                                  std::to_string(inflow));

    ComparisonTable table;
    for (int i = 0; i < 7; ++i) table.metric_names.push_back(kMetricNames[i]);
    table.percent_diff.assign(7, {});
    for (const auto& [inflow, base_recs] : baseline) {
        table.inflows.push_back(inflow);
        const AggregateStats base = aggregate_metrics(base_recs);
        const AggregateStats ours = aggregate_metrics(rl.at(inflow));
        table.baseline.push_back(base);
        table.rl.push_back(ours);
        const auto bv = metric_values(base.mean);
        const auto rv = metric_values(ours.mean);
        for (int m = 0; m < 7; ++m) {
            const double pct = bv[m] != 0.0 ? 100.0 * (rv[m] - bv[m]) / bv[m]
                                            : (rv[m] == 0.0 ? 0.0 : INFINITY);
            table.percent_diff[m].push_back(pct);
        }
    }
    return table;
}

std::string comparison_table_text(const ComparisonTable& table) {
    std::ostringstream out;
    out << "Performance metric changes vs. baseline (human drivers)\n";
    char buf[128];
    out << std::string(44, ' ');
    for (int inflow : table.inflows) {
        std::snprintf(buf, sizeof(buf), "  %16s", (std::to_string(inflow) + " vphpl").c_str());
        out << buf;
    }
    out << '\n';
    for (std::size_t m = 0; m < table.metric_names.size(); ++m) {
        std::snprintf(buf, sizeof(buf), "%-44s", table.metric_names[m].c_str());
        out << buf;
        for (double pct : table.percent_diff[m]) {
            std::snprintf(buf, sizeof(buf), "  %+15.1f%%", pct);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string comparison_table_csv(const ComparisonTable& table) {
    std::ostringstream out;
    out << "metric";
    for (int inflow : table.inflows) out << ",pct_diff_" << inflow << "_vphpl";
    out << '\n';
    char buf[64];
    for (std::size_t m = 0; m < table.metric_names.size(); ++m) {
        out << '"' << table.metric_names[m] << '"';
        for (double pct : table.percent_diff[m]) {
            std::snprintf(buf, sizeof(buf), ",%.6g", pct);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
    std::string out =
        "throughput_vph,mean_speed_mps,mean_travel_time_s,stops_per_vehicle,"
        "fuel_efficiency_mpg,co2_g_per_mi,nox_mg_per_mi\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.throughput_vph, r.mean_speed_mps, r.mean_travel_time_s,
                      r.stops_per_vehicle, r.fuel_efficiency_mpg, r.co2_g_per_mi,
                      r.nox_mg_per_mi);
        out += buf;
    }
    return out;
}

std::vector<MetricsRecord> metrics_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("throughput_vph,", 0) != 0)
        throw DataError("metrics csv: missing header");
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        MetricsRecord r;
        char comma;
        ls >> r.throughput_vph >> comma >> r.mean_speed_mps >> comma >> r.mean_travel_time_s >>
            comma >> r.stops_per_vehicle >> comma >> r.fuel_efficiency_mpg >> comma >>
            r.co2_g_per_mi >> comma >> r.nox_mg_per_mi;
        if (!ls) throw DataError("metrics csv: malformed row");
        out.push_back(r);
    }
    return out;
}

}  // namespace weave
