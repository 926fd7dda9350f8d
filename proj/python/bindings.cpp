#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "iccv/behavior.hpp"
#include "iccv/calib.hpp"
#include "iccv/errors.hpp"
#include "iccv/linalg.hpp"
#include "iccv/normal.hpp"
#include "iccv/posterior.hpp"
#include "iccv/prior.hpp"
#include "iccv/rng.hpp"
#include "iccv/solver.hpp"

namespace py = pybind11;
using namespace iccv;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    Matrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m) throw std::invalid_argument("matrix rows have unequal lengths");
        for (std::size_t j = 0; j < m; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

} // namespace

PYBIND11_MODULE(_iccv, m) {
    m.doc() = "Strategic researcher behavior simulation and incentive-compatible critical values";

    py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError");
    py::register_exception<SingularPriorError>(m, "SingularPriorError");
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
    py::register_exception<SearchFailureError>(m, "SearchFailureError");
    py::register_exception<NoThresholdError>(m, "NoThresholdError");
    py::register_exception<InconsistentSummaryError>(m, "InconsistentSummaryError", PyExc_ValueError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);

    py::enum_<Tail>(m, "Tail")
        .value("two_sided", Tail::two_sided)
        .value("upper_one_sided", Tail::upper_one_sided);

    m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
    m.def("std_normal_pdf", &std_normal_pdf, py::arg("x"));
    m.def("std_normal_quantile", &std_normal_quantile, py::arg("p"));

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init([](std::uint64_t seed, const std::vector<std::uint64_t>& path) {
                 return RandomStream(seed, std::span<const std::uint64_t>(path));
             }),
             py::arg("seed"), py::arg("path") = std::vector<std::uint64_t>{})
        .def("child", &RandomStream::child, py::arg("index"))
        .def("next_u64", &RandomStream::next_u64)
        .def("next_uniform", &RandomStream::next_uniform)
        .def("next_normal", &RandomStream::next_normal)
        .def_property_readonly("seed", &RandomStream::seed)
        .def_property_readonly("path", &RandomStream::path);

    m.def(
        "sample_std_normal", [](RandomStream& s) { return sample_std_normal(s); },
        py::arg("stream"));
    m.def(
        "sample_mvn",
        [](const std::vector<double>& mean, const std::vector<std::vector<double>>& cov,
           RandomStream& stream) { return sample_mvn(mean, matrix_from_rows(cov), stream); },
        py::arg("mean"), py::arg("cov"), py::arg("stream"));

    py::class_<Prior>(m, "Prior")
        .def_static("point_mass", &Prior::point_mass, py::arg("theta"))
        .def_static("uniform", &Prior::uniform, py::arg("a"), py::arg("b"))
        .def_static("normal", &Prior::normal, py::arg("mu"), py::arg("sigma"))
        .def_property_readonly("is_normal", &Prior::is_normal)
        .def("__repr__", &Prior::describe);

    m.def("rejection_prob", &rejection_prob, py::arg("prior"), py::arg("z"), py::arg("tail"));
    m.def("rejection_prob_quadrature", &rejection_prob_quadrature, py::arg("prior"), py::arg("z"),
          py::arg("tail"));
    m.def("subjective_mixture", &subjective_mixture, py::arg("prior_term"),
          py::arg("posterior_term"), py::arg("alpha_s"));

    py::class_<PosteriorScalar>(m, "PosteriorScalar")
        .def_readonly("mean", &PosteriorScalar::mean)
        .def_readonly("variance", &PosteriorScalar::variance);
    m.def(
        "posterior_scalar",
        [](const Prior& prior, const std::vector<double>& obs) {
            return posterior_scalar(prior, obs);
        },
        py::arg("prior"), py::arg("observations"));

    py::class_<MvnPrior>(m, "MvnPrior")
        .def(py::init([](const std::vector<double>& mean,
                         const std::vector<std::vector<double>>& cov) {
                 return MvnPrior(mean, matrix_from_rows(cov));
             }),
             py::arg("mean"), py::arg("cov"))
        .def_property_readonly("mean", [](const MvnPrior& p) { return p.mean; })
        .def_property_readonly("cov", [](const MvnPrior& p) { return matrix_to_rows(p.cov); });
    m.def(
        "posterior_general",
        [](const MvnPrior& prior, const std::vector<std::vector<double>>& omega_prev,
           const std::vector<double>& obs, std::optional<double> jitter) {
            return posterior_general(prior, matrix_from_rows(omega_prev), obs, jitter);
        },
        py::arg("prior"), py::arg("omega_prev"), py::arg("observations"),
        py::arg("jitter") = std::nullopt);

    py::class_<CostSchedule>(m, "CostSchedule")
        .def_static("constant", &CostSchedule::constant, py::arg("c"))
        .def_static("power_law", &CostSchedule::power_law, py::arg("c0"), py::arg("epsilon"))
        .def("at", &CostSchedule::at, py::arg("n"));

    py::class_<Incentives>(m, "Incentives")
        .def(py::init<double, CostSchedule>(), py::arg("payoff"), py::arg("cost"))
        .def_readonly("payoff", &Incentives::payoff)
        .def("cost_ratio", &Incentives::cost_ratio, py::arg("n") = 1);

    py::class_<GeneralSpec>(m, "GeneralSpec")
        .def(py::init<>())
        .def_readwrite("alpha_s", &GeneralSpec::alpha_s)
        .def_readwrite("rho", &GeneralSpec::rho)
        .def_readwrite("jitter", &GeneralSpec::jitter)
        .def_readwrite("lambda_values", &GeneralSpec::lambda_values)
        .def_readwrite("study_sizes", &GeneralSpec::study_sizes)
        .def("set_lambda_kind",
             [](GeneralSpec& s, const std::string& kind) {
                 if (kind == "ones") s.lambda_kind = GeneralSpec::LambdaKind::ones;
                 else if (kind == "sqrt_index") s.lambda_kind = GeneralSpec::LambdaKind::sqrt_index;
                 else if (kind == "custom") s.lambda_kind = GeneralSpec::LambdaKind::custom;
                 else throw std::invalid_argument("lambda kind: ones|sqrt_index|custom");
             })
        .def("set_omega_kind", [](GeneralSpec& s, const std::string& kind) {
            if (kind == "identity") s.omega_kind = GeneralSpec::OmegaKind::identity;
            else if (kind == "pooling") s.omega_kind = GeneralSpec::OmegaKind::pooling;
            else if (kind == "constant_rho") s.omega_kind = GeneralSpec::OmegaKind::constant_rho;
            else throw std::invalid_argument("omega kind: identity|pooling|constant_rho");
        });

    py::class_<BehaviorModel>(m, "BehaviorModel")
        .def_static("baseline", &BehaviorModel::baseline)
        .def_static("increasing_cost", &BehaviorModel::increasing_cost)
        .def_static("learning", &BehaviorModel::learning)
        .def_static("pooling", &BehaviorModel::pooling)
        .def_static("general", &BehaviorModel::general, py::arg("spec"))
        .def_property_readonly("name", &BehaviorModel::name);

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readonly("n_studies", &Trajectory::n_studies)
        .def_readonly("latent", &Trajectory::latent)
        .def_readonly("reported", &Trajectory::reported)
        .def_readonly("rejected", &Trajectory::rejected)
        .def_readonly("capped", &Trajectory::capped);

    m.def("continue_decision", &continue_decision, py::arg("model"), py::arg("state"),
          py::arg("prior"), py::arg("incentives"), py::arg("z"), py::arg("tail"));
    m.def("continue_probability", &continue_probability, py::arg("model"), py::arg("state"),
          py::arg("prior"), py::arg("incentives"), py::arg("z"), py::arg("tail"));
    m.def("n_max_increasing_cost", &n_max_increasing_cost, py::arg("prior"), py::arg("incentives"),
          py::arg("z"), py::arg("tail"));
    m.def("next_latent", &next_latent, py::arg("model"), py::arg("state"), py::arg("theta_true"),
          py::arg("stream"));
    m.def("simulate_trajectory", &simulate_trajectory, py::arg("model"), py::arg("prior"),
          py::arg("incentives"), py::arg("z"), py::arg("tail"), py::arg("theta_true"),
          py::arg("cap"), py::arg("stream"));

    py::class_<SizeEstimate>(m, "SizeEstimate")
        .def_readonly("size", &SizeEstimate::size)
        .def_readonly("std_error", &SizeEstimate::std_error)
        .def_readonly("reps", &SizeEstimate::reps)
        .def_readonly("cap_hit_rate", &SizeEstimate::cap_hit_rate);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("lo"), py::arg("hi"), py::arg("step"))
        .def_readwrite("lo", &GridSpec::lo)
        .def_readwrite("hi", &GridSpec::hi)
        .def_readwrite("step", &GridSpec::step);

    py::class_<ICCVResult>(m, "ICCVResult")
        .def_readonly("z_star", &ICCVResult::z_star)
        .def_readonly("size_at_z", &ICCVResult::size_at_z)
        .def_readonly("grid_step", &ICCVResult::grid_step)
        .def_readonly("nonzero_power", &ICCVResult::nonzero_power)
        .def_readonly("mean_studies", &ICCVResult::mean_studies);

    m.def("classical_quantile", &classical_quantile, py::arg("alpha"), py::arg("tail"));
    m.def("estimate_size", &estimate_size, py::arg("model"), py::arg("prior"),
          py::arg("incentives"), py::arg("z"), py::arg("tail"), py::arg("reps"), py::arg("seed"),
          py::arg("cap") = kDefaultCap, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("estimate_power", &estimate_power, py::arg("model"), py::arg("prior"),
          py::arg("incentives"), py::arg("z"), py::arg("tail"), py::arg("theta_true"),
          py::arg("reps"), py::arg("seed"), py::arg("cap") = kDefaultCap, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("size_closed_form_iid", &size_closed_form_iid, py::arg("z"), py::arg("n"),
          py::arg("tail"));
    m.def("mean_num_studies", &mean_num_studies, py::arg("model"), py::arg("prior"),
          py::arg("incentives"), py::arg("z"), py::arg("tail"), py::arg("reps"), py::arg("seed"),
          py::arg("cap") = kDefaultCap, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("find_iccv", &find_iccv, py::arg("model"), py::arg("prior"), py::arg("incentives"),
          py::arg("tail"), py::arg("alpha"), py::arg("reps"), py::arg("seed"),
          py::arg("grid") = GridSpec{}, py::arg("cap") = kDefaultCap, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("baseline_threshold", &baseline_threshold, py::arg("prior"), py::arg("incentives"),
          py::arg("tail"));

    py::class_<MatchedPairsStudy>(m, "MatchedPairsStudy")
        .def(py::init([](int n, int sum_x, int sum_y) {
                 MatchedPairsStudy s{n, sum_x, sum_y};
                 s.validate();
                 return s;
             }),
             py::arg("n"), py::arg("sum_x"), py::arg("sum_y"))
        .def_readonly("n", &MatchedPairsStudy::n)
        .def_readonly("sum_x", &MatchedPairsStudy::sum_x)
        .def_readonly("sum_y", &MatchedPairsStudy::sum_y)
        .def_property_readonly("beta_hat", &MatchedPairsStudy::beta_hat);

    py::class_<SdBounds>(m, "SdBounds")
        .def_readonly("sd_lb", &SdBounds::sd_lb)
        .def_readonly("sd_mid", &SdBounds::sd_mid)
        .def_readonly("sd_ub", &SdBounds::sd_ub);

    m.def("matched_pairs_sd_bounds",
          py::overload_cast<const MatchedPairsStudy&>(&matched_pairs_sd_bounds), py::arg("study"));
    m.def("matched_pairs_sd_bounds",
          py::overload_cast<const MatchedPairsStudy&, double>(&matched_pairs_sd_bounds),
          py::arg("study"), py::arg("beta_hat"));

    py::class_<CalibStudy>(m, "CalibStudy")
        .def(py::init([](int n, int sum_x, int sum_y, double beta_hat) {
                 CalibStudy s{MatchedPairsStudy{n, sum_x, sum_y}, beta_hat};
                 s.summary.validate();
                 return s;
             }),
             py::arg("n"), py::arg("sum_x"), py::arg("sum_y"), py::arg("beta_hat"))
        .def_readonly("summary", &CalibStudy::summary)
        .def_readonly("beta_hat", &CalibStudy::beta_hat);

    m.def(
        "calibrate_prior",
        [](const std::vector<CalibStudy>& studies, double target_n) {
            return calibrate_prior(studies, target_n);
        },
        py::arg("studies"), py::arg("target_n") = 48.75);
    m.def("load_studies_file", &load_studies_file, py::arg("path"));
    m.def("elicitation_bounds", &elicitation_bounds, py::arg("n_bar"), py::arg("z"),
          py::arg("prior"));

    py::class_<BoundsRow>(m, "BoundsRow")
        .def_readonly("n_bar", &BoundsRow::n_bar)
        .def_readonly("lower", &BoundsRow::lower)
        .def_readonly("upper", &BoundsRow::upper);
    py::class_<BoundsTable>(m, "BoundsTable")
        .def_readonly("rows", &BoundsTable::rows)
        .def_readonly("cost_ratio", &BoundsTable::cost_ratio)
        .def_readonly("implied_n_bar", &BoundsTable::implied_n_bar);
    m.def("cost_ratio_bounds_table", &cost_ratio_bounds_table, py::arg("z"), py::arg("prior"),
          py::arg("n_bar_max"), py::arg("cost_ratio"));
    m.def("published_cost_ratio_bounds", &published_cost_ratio_bounds, py::arg("n_bar"));
}
