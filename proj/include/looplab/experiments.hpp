#pragma once

#include "looplab/biot_savart.hpp"
#include "looplab/circulation.hpp"
#include "looplab/config.hpp"
#include "looplab/fit.hpp"
#include "looplab/gaussian_mc.hpp"
#include "looplab/loop_operators.hpp"
#include "looplab/momentum.hpp"

#include <functional>
#include <string>
#include <vector>

namespace looplab {

// ---- output plumbing ----

std::string num(double v);  // shortest round-trip text

struct Table {
    std::string name;
    std::vector<std::string> header;  // written as "# line"
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string csv() const;
};

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct Plot {
    std::string name;
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<std::string> legend;  // parameter lines
    std::string svg() const;          // log-log line plot
};

struct ExperimentOutput {
    std::string id;
    bool gating = true;  // false: exploratory, never fails the run
    bool pass = true;
    std::vector<std::string> notes;
    std::vector<Table> tables;
    std::vector<Plot> plots;
    std::vector<FitResult> fits;

    void check(bool ok, const std::string& what);
};

// ---- studies ----

struct RadScanRow {
    int N;
    double h, r_ad;
};
struct RadScan {
    std::vector<RadScanRow> rows;
    FitResult fit;
};
// |R_ad| at vertex k of the N-gon inscribed in the curve, against h = |C_{k+1} - C_{k-1}|.
RadScan rad_scan(const AnalyticField& f, const SampledCurve& curve, const std::vector<int>& Ns, double t,
                 const QuadratureConfig& q);

struct ResidualScanRow {
    double alpha;
    int N;
    double r_loop, r_loop_flipped, budget, bound, dt_psi;
    bool monotone, dominated;
};
struct ResidualScan {
    std::vector<ResidualScanRow> rows;
    std::vector<double> frozen_C;  // one per alpha, fitted at the smallest N
    bool pass = true;
    std::string failing;
};
double residual_budget(int N, double alpha);
ResidualScan residual_scan(const AnalyticField& f, const SampledCurve& curve, const OperatorParams& base,
                           const std::vector<int>& Ns, const std::vector<double>& alphas, double t,
                           const QuadratureConfig& q);

struct LiquidScanRow {
    int N;
    double residual, residual_plain, bound;
};
struct LiquidScan {
    std::vector<LiquidScanRow> rows;
    double frozen_C = 0.0;
    FitResult fit;  // residual vs 1/N
    bool dominated = true;
};
LiquidScan liquid_scan(const AnalyticField& f, const SampledCurve& curve, const OperatorParams& base,
                       const std::vector<int>& Ns, double t, const QuadratureConfig& q);

struct BsClosedRow {
    WaveMode mode;
    Vec3 x;
    double ell;
    double relative;
};
struct BsClosedReport {
    std::vector<BsClosedRow> rows;
    double worst = 0.0;
    double decay_max = 0.0;  // max |R(k)| (1 + k)^4 on the sampled kappa range
    std::vector<std::pair<double, double>> decay;  // (kappa, |R|(1+kappa)^4)
};
BsClosedReport bs_closed_form_check(int cases, std::uint64_t seed, const BSConfig& base);

struct WeightedField {
    AnalyticField field;
    double weight;
};
// P(theta) = re_c cos(2 pi theta) + re_s sin(2 pi theta) + i im
struct MomentumProfile {
    Vec3 re_c, re_s, im;
    double weight;
};
struct TaylorRow {
    double sigma, remainder;
};
struct ObstructionReport {
    cplx left_coeff;  // 2 i E[A.w]
    cplx left_direct;  // sigma^2 coefficient of 2 E[psi]
    cplx right;         // -E[(int P.gamma')^2]
    Vec3 area;          // A = int gamma' x gamma
    double mismatch = 0.0;
    std::vector<TaylorRow> taylor;
    FitResult taylor_fit;
    double left_expansion_check = 0.0;  // |direct sigma^2 coefficient - left_direct| at the smallest sigma
};
// The Taylor scan uses the loop taylor_x + sigma (gamma + taylor_offset); an offset makes
// the odd moments of the loop nonzero so that the sigma^3 term is present.
ObstructionReport obstruction_demo(const std::vector<WeightedField>& mu, const std::vector<MomentumProfile>& beta,
                                   const SampledCurve& gamma, const Vec3& x, const AnalyticField& taylor_field,
                                   const Vec3& taylor_x, const Vec3& taylor_offset, const std::vector<double>& sigmas);

struct KelvinReport {
    int steps = 0;
    double rel_error = 0.0;          // against -nu oint curl w . dC
    double rel_error_flipped = 0.0;  // against +nu oint curl w . dC
    double halving_ratio = 0.0;      // |S_h - S_h/2| / |S_h/2 - S_h/4| at the final time
    std::vector<double> t, circ, dcirc, rhs;
};
KelvinReport kelvin_check(const AnalyticField& f, const SampledCurve& C0, double nu, double t_end, int steps,
                          int panels = 64);

struct OracleCase {
    std::string field, op;
    int loop, k;
    double rel;
};
struct OracleSuite {
    std::vector<OracleCase> cases;
    double worst = 0.0;
    std::string worst_case;
};
double rel_err(const CVec3& a, const CVec3& b, double floor = 1e-8);
OracleSuite operator_oracle_suite(int N, int loops, std::uint64_t seed, const OperatorParams& p,
                                  const QuadratureConfig& q, int momentum_states);

struct DegeneracyReport {
    double rotation_r_ad = 0.0;
    double constant_ops = 0.0;
    double sbp = 0.0;
    double gauge = 0.0;
};
DegeneracyReport degeneracy_checks(int N, int states, std::uint64_t seed, const OperatorParams& p,
                                   const QuadratureConfig& q);

struct IndexArbitration {
    double kplus2 = 0.0;  // max relative gap between e_k and the operator composition
    double kplus1 = 0.0;
    double liquid_identity = 0.0;
    std::string confirmed;
};
IndexArbitration index_arbitration(int N, int states, std::uint64_t seed, const OperatorParams& p);

struct OperatorErrorRow {
    int N;
    double ell, r_ad, r_diff, r_vel, r_bs, r_vel1, r_vel2, r_adv;
};
std::vector<OperatorErrorRow> operator_error_scan(const AnalyticField& f, const SampledCurve& curve,
                                                  const OperatorParams& base, const std::vector<int>& Ns, double t,
                                                  const QuadratureConfig& q);

struct RbadRow {
    int N;
    double total, r_bad, r_bad_log, inv_log;
};
std::vector<RbadRow> rbad_scan(const AnalyticField& f, const SampledCurve& curve, const OperatorParams& base,
                               const std::vector<int>& Ns, double t, const QuadratureConfig& q);

// ---- registry ----

struct RunContext {
    RunConfig cfg;
    AnalyticField field;
    SampledCurve curve;
};

using Runner = std::function<ExperimentOutput(const RunContext&)>;

struct ExperimentInfo {
    std::string id;
    std::string title;
    std::string verifies;
    std::string keys;  // accepted per-experiment keys
    std::function<Runner(const Section&)> configure;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& id);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

struct RunSummary {
    int exit_code = 0;
    std::string out_dir;
    std::vector<ExperimentOutput> outputs;
};

// Parses, runs and writes <out>/<id>/*.csv|svg plus <out>/manifest.json.
// exit_code: 0 all gating experiments pass, 2 otherwise. Throws ConfigError on bad input.
RunSummary run_config(const RunConfig& cfg, const RunOverrides& ov, const std::string& tool_version);

}  // namespace looplab
