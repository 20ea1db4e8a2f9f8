#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "weavesim/episode_log.hpp"
#include "weavesim/road.hpp"

namespace weave {

/// The six evaluation metrics of one episode.
struct MetricsRecord {
    double throughput_vph = 0.0;
    double mean_speed_mps = 0.0;
    double mean_travel_time_s = 0.0;
    double stops_per_vehicle = 0.0;
    double fuel_efficiency_mpg = 0.0;
    double co2_g_per_mi = 0.0;
    double nox_mg_per_mi = 0.0;
    bool empty = false;  // no vehicles in the log
};

/// Demand-polynomial coefficients, one set per output:
///   rate(v, a) = max(0, c0 + c1*v*a + c2*v*a^2 + c3*v + c4*v^2 + c5*v^3)
/// Units: fuel ml/s, CO2 mg/s, NOx mg/s. The shipped defaults are
/// order-of-magnitude-plausible for a compact gasoline car; the model form is
/// what matters, the constants are configurable.
using PolyCoeffs = std::array<double, 6>;
struct EmissionCoefficients {
    PolyCoeffs fuel{0.25, 0.08, 0.02, 0.025, 0.0008, 0.000032};
    PolyCoeffs co2{580.0, 185.6, 46.4, 58.0, 1.856, 0.07424};
    PolyCoeffs nox{0.2, 0.064, 0.016, 0.02, 0.00064, 0.0000256};
};

double emission_rate(double speed, double accel, const PolyCoeffs& c);

/// Metrics over the whole segment presence of each vehicle: throughput from
/// exit events, travel time spawn-to-exit over exited vehicles, stops with
/// 0.3/2.0 m/s hysteresis, fuel and emissions integrated per step and
/// normalized by each vehicle's distance.
MetricsRecord compute_metrics(const EpisodeLog& log, const EmissionCoefficients& coeffs);

/// Vehicle counts per (time step, spatial bin) over the control area.
struct DensityMap {
    double origin_m = 0.0;
    double bin_m = 10.0;
    int steps = 0;
    int bins = 0;
    std::vector<int> counts;  // steps x bins, row-major

    int at(int step, int bin) const { return counts[step * bins + bin]; }
    int row_sum(int step) const;
};

DensityMap density_map(const EpisodeLog& log, const RoadNetwork& road, double bin_m = 10.0);

struct AggregateStats {
    MetricsRecord mean;
    MetricsRecord stddev;  // sample standard deviation
    int count = 0;
};

AggregateStats aggregate_metrics(const std::vector<MetricsRecord>& records);

/// Table-shaped baseline-vs-RL comparison across inflow scenarios.
struct ComparisonTable {
    std::vector<int> inflows;  // column order
    // metric name -> per-inflow percent difference 100*(rl-baseline)/baseline
    std::vector<std::string> metric_names;
    std::vector<std::vector<double>> percent_diff;  // [metric][inflow]
    std::vector<AggregateStats> baseline, rl;       // per inflow
};

/// Throws StructuralError when the two maps do not cover the same scenarios.
ComparisonTable build_comparison(const std::map<int, std::vector<MetricsRecord>>& baseline,
                                 const std::map<int, std::vector<MetricsRecord>>& rl);

std::string comparison_table_text(const ComparisonTable& table);
std::string comparison_table_csv(const ComparisonTable& table);

std::string metrics_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> metrics_from_csv(const std::string& csv);

}  // namespace weave
