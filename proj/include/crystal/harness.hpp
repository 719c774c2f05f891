#pragma once

#include "crystal/calibrate.hpp"
#include "crystal/flow_eff.hpp"
#include "crystal/flow_eps.hpp"
#include "crystal/forcing.hpp"
#include "crystal/geometry.hpp"
#include "crystal/trajectory.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace crystal::harness {

// Worker count for parallel sweeps: CRYSTAL_FLOW_THREADS if set, else hardware concurrency.
int thread_count();

std::vector<double> linspace(double a, double b, int n);

// ---- convergence ------------------------------------------------------------------------

struct ConvergeConfig {
    double alpha = -1.0, beta = 1.0;
    Polyrectangle initial;
    std::vector<double> eps_list;  // strictly decreasing
    double T = 0.0;                // <= 0: 0.9 times the effective extinction time
    int samples = 200;
    EpsOptions eps_options;        // sample_times and auto_snap are overridden
};

struct ConvergeRow {
    double eps = 0.0;
    double sup_distance = 0.0;
    double t_at_sup = 0.0;
    double initial_distance = 0.0;
    std::size_t events = 0;
    bool extinct_early = false;  // the eps-flow vanished before T
};

struct ConvergeReport {
    double T = 0.0;
    std::vector<ConvergeRow> rows;
    double order = 0.0;  // least-squares slope of log(error) against log(eps)
    bool monotone = true;
    double max_ratio = 0.0;  // max over rows of error / eps
};

ConvergeReport converge(const ConvergeConfig& cfg);

// ---- comparison ---------------------------------------------------------------------------

struct CompareConfig {
    ForcingField F;
    Polyrectangle inner, outer;
    double T = 1.0;
    int samples = 100;
    bool auto_snap = true;
};

struct CompareReport {
    bool containment = true;
    bool gap_from_start = true;  // gap(t) >= gap(0)
    bool gap_ordered = true;     // gap(t1) >= gap(t2) - eps for t1 >= t2
    std::vector<double> times, gaps;
    std::vector<std::string> violations;
    bool ok() const { return containment && gap_from_start && gap_ordered; }
};

CompareReport compare(const CompareConfig& cfg);

// ---- phase portrait -----------------------------------------------------------------------

enum class Regime { Extinction, Equilibrium, PinnedExpansion, Undetermined };

std::string to_string(Regime r);

struct PortraitRow {
    double l10 = 0.0, l20 = 0.0;
    Regime regime = Regime::Undetermined;
    double t_end = 0.0;
    double l1_end = 0.0, l2_end = 0.0;
    double pinned_time = 0.0;  // time spent with l2 >= -2/alpha (l1 frozen)
};

struct PortraitConfig {
    double alpha = -1.0, beta = 1.0;
    std::vector<double> l1_values, l2_values;
    double T = 50.0;
};

std::vector<PortraitRow> portrait(const PortraitConfig& cfg);
std::string portrait_csv(const std::vector<PortraitRow>& rows);

// ---- random C-polyrectangles ----------------------------------------------------------------

struct RandomShapeOptions {
    int max_steps = 2;           // columns on each side of the centre block
    double min_height = 0.4, max_height = 3.0;
    int max_step_cells = 2;      // column width in periods
    int max_center_cells = 4;
};

// Orthogonally convex polyrectangle whose left vertical edges sit on beta->alpha interfaces and
// right ones on alpha->beta interfaces; every horizontal edge is then calibrable.
Polyrectangle random_c_polyrectangle(const ForcingField& F, std::mt19937_64& rng, const RandomShapeOptions& opt = {},
                                     Vec2 offset = {});

// Random nested pair (inner strictly inside outer, positive gap).
std::pair<Polyrectangle, Polyrectangle> random_nested_pair(const ForcingField& F, std::mt19937_64& rng);

// ---- calibrability corpus ------------------------------------------------------------------

struct OracleCase {
    ForcingField F;
    HorizontalEdge edge;
    bool analytic = false, oracle = false, marginal = false;
};

struct OracleCorpusConfig {
    int count = 500;
    int M = 400;  // taut-string nodes per period
    std::uint64_t seed = 1;
};

struct OracleCorpusReport {
    int total = 0, compared = 0, marginal = 0, agree = 0;
    int calibrable = 0;  // compared edges the analytic test accepts
    std::vector<OracleCase> disagreements;
    double seconds = 0.0;
};

// Random valid field and random horizontal edge (chi in {-1, 0, 1}).
OracleCase random_edge(std::mt19937_64& rng);
OracleCorpusReport oracle_corpus(const OracleCorpusConfig& cfg);

// ---- rendering ------------------------------------------------------------------------------

std::string svg_polygon(const std::vector<Vec2>& boundary, double margin = 0.5);
// One file per requested time, named <prefix>_<k>.svg, showing the nearest sample.
std::vector<std::string> render_svg(const FlowTrajectory& tr, const std::vector<double>& times,
                                    const std::string& prefix);
std::vector<std::string> render_svg(const flow_eff::ConvexRun& run, const std::vector<double>& times,
                                    const std::string& prefix);

}  // namespace crystal::harness
