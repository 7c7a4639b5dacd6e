#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "dimkit/experiment.hpp"
#include "dimkit/greedy.hpp"
#include "dimkit/verify.hpp"

namespace py = pybind11;
using namespace dimkit;

namespace {

SimilarityTable table_from_rows(const std::vector<std::vector<double>>& rows) {
    SimilarityTable t;
    t.rows = rows;
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Heuristic-guided diffusion sampling toolkit (analytic toy models)";

    py::class_<NoiseSchedule>(m, "NoiseSchedule")
        .def(py::init<double, double>(), py::arg("beta_min"), py::arg("beta_max"))
        .def_property_readonly("beta_min", &NoiseSchedule::beta_min)
        .def_property_readonly("beta_max", &NoiseSchedule::beta_max)
        .def_property_readonly("horizon", &NoiseSchedule::horizon)
        .def("beta", &NoiseSchedule::beta)
        .def("alpha", &NoiseSchedule::alpha)
        .def("sigma", &NoiseSchedule::sigma)
        .def("snr", &NoiseSchedule::snr)
        .def("drift", &NoiseSchedule::drift)
        .def("diffusion_sq", &NoiseSchedule::diffusion_sq);
    m.def("make_vp_schedule", &make_vp_schedule, py::arg("beta_min") = 0.1,
          py::arg("beta_max") = 20.0);
    m.def("drift_diffusion", &drift_diffusion);

    py::enum_<GridDirection>(m, "GridDirection")
        .value("descending", GridDirection::descending)
        .value("ascending", GridDirection::ascending);
    py::class_<TimeGrid>(m, "TimeGrid")
        .def_readonly("nodes", &TimeGrid::nodes)
        .def_readonly("direction", &TimeGrid::direction)
        .def("__len__", [](const TimeGrid& g) { return g.size(); });
    m.def("linear_time_grid", &linear_time_grid, py::arg("n"), py::arg("t_min"),
          py::arg("t_max"), py::arg("direction"));
    m.def("truncate_to_noise_level", &truncate_to_noise_level);

    m.def("encode_semantic", &encode_semantic);
    py::class_<GaussianIdentityModel>(m, "GaussianIdentityModel")
        .def(py::init<double, int>(), py::arg("data_stddev"), py::arg("dim"))
        .def_property_readonly("data_stddev", &GaussianIdentityModel::data_stddev)
        .def_property_readonly("dim", &GaussianIdentityModel::dim)
        .def_property_readonly("nfe", &GaussianIdentityModel::nfe)
        .def("reset_nfe", &GaussianIdentityModel::reset_nfe)
        .def("epsilon", &GaussianIdentityModel::epsilon, py::arg("x_t"), py::arg("z"),
             py::arg("t"), py::arg("schedule"), py::arg("count_eval") = true)
        .def("epsilon_pair", &GaussianIdentityModel::epsilon_pair)
        .def("posterior_mean", &GaussianIdentityModel::posterior_mean);

    py::enum_<SolverKind>(m, "SolverKind")
        .value("ddim", SolverKind::ddim)
        .value("dpmpp_2m", SolverKind::dpmpp_2m);
    py::enum_<ForwardKind>(m, "ForwardKind")
        .value("diffae_forward", ForwardKind::diffae_forward)
        .value("ddim_forward", ForwardKind::ddim_forward);
    m.def("x0_from_eps", &x0_from_eps);
    m.def("eps_from_x0", &eps_from_x0);
    m.def("ddim_step", &ddim_step);
    m.def("solve_pf_ode",
          [](const GaussianIdentityModel& model, const Vec& x_T, const Vec& z,
             const TimeGrid& grid, const NoiseSchedule& sched, SolverKind kind) {
              const SolveResult r = solve_pf_ode(model, x_T, z, grid, sched, kind);
              return py::make_tuple(r.state, r.nfe);
          },
          py::arg("model"), py::arg("x_T"), py::arg("z"), py::arg("grid"),
          py::arg("schedule"), py::arg("kind") = SolverKind::ddim);
    m.def("encode_forward",
          [](const GaussianIdentityModel& model, const Vec& x0, const Vec& z,
             const TimeGrid& grid, const NoiseSchedule& sched, ForwardKind kind) {
              const SolveResult r = encode_forward(model, x0, z, grid, sched, kind);
              return py::make_tuple(r.state, r.nfe);
          },
          py::arg("model"), py::arg("x0"), py::arg("z"), py::arg("grid"),
          py::arg("schedule"), py::arg("kind") = ForwardKind::diffae_forward);

    py::enum_<NfeMode>(m, "NfeMode")
        .value("dim", NfeMode::dim)
        .value("morph_pipe", NfeMode::morph_pipe)
        .value("greedy_s", NfeMode::greedy_s)
        .value("greedy_star", NfeMode::greedy_star)
        .value("fast_dim_style", NfeMode::fast_dim_style);
    m.def("nfe_accounting", &nfe_accounting, py::arg("mode"), py::arg("encode_nfe"),
          py::arg("sample_nfe"), py::arg("blends") = std::nullopt);

    py::enum_<InterpMode>(m, "InterpMode")
        .value("slerp", InterpMode::slerp)
        .value("lerp", InterpMode::lerp);
    m.def("interpolate", &interpolate, py::arg("u"), py::arg("v"), py::arg("gamma"),
          py::arg("mode") = InterpMode::slerp);
    m.def("uniform_blends", &uniform_blends);

    py::class_<BonaFidePair>(m, "BonaFidePair")
        .def(py::init([](Vec a, Vec b) {
                 BonaFidePair p;
                 p.x0_a = std::move(a);
                 p.x0_b = std::move(b);
                 return p;
             }),
             py::arg("x0_a"), py::arg("x0_b"))
        .def_readwrite("x0_a", &BonaFidePair::x0_a)
        .def_readwrite("x0_b", &BonaFidePair::x0_b)
        .def_readwrite("label_a", &BonaFidePair::label_a)
        .def_readwrite("label_b", &BonaFidePair::label_b);

    py::enum_<Variant>(m, "Variant")
        .value("dim", Variant::dim)
        .value("morph_pipe", Variant::morph_pipe)
        .value("greedy_s", Variant::greedy_s)
        .value("greedy_w", Variant::greedy_w)
        .value("greedy_star", Variant::greedy_star);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("t", &StepRecord::t)
        .def_readonly("blend", &StepRecord::blend)
        .def_readonly("heuristic", &StepRecord::heuristic);

    py::class_<MorphResult>(m, "MorphResult")
        .def_readonly("x0_ab", &MorphResult::x0_ab)
        .def_readonly("nfe", &MorphResult::nfe)
        .def_readonly("per_step", &MorphResult::per_step)
        .def_readonly("variant", &MorphResult::variant)
        .def_readonly("chosen_blend", &MorphResult::chosen_blend)
        .def_readonly("heuristic_value", &MorphResult::heuristic_value);

    py::class_<MorphConfig>(m, "MorphConfig")
        .def(py::init<>())
        .def_readwrite("beta_min", &MorphConfig::beta_min)
        .def_readwrite("beta_max", &MorphConfig::beta_max)
        .def_readwrite("data_stddev", &MorphConfig::data_stddev)
        .def_readwrite("dim", &MorphConfig::dim)
        .def_readwrite("encode_steps", &MorphConfig::encode_steps)
        .def_readwrite("sample_steps", &MorphConfig::sample_steps)
        .def_readwrite("solver", &MorphConfig::solver)
        .def_readwrite("forward_solver", &MorphConfig::forward_solver)
        .def_readwrite("random_initial_noise", &MorphConfig::random_initial_noise)
        .def_readwrite("noise_seed", &MorphConfig::noise_seed);

    py::enum_<DistanceKind>(m, "DistanceKind")
        .value("cosine", DistanceKind::cosine)
        .value("l2", DistanceKind::l2);
    py::class_<EmbeddingModel>(m, "EmbeddingModel")
        .def_static("seeded", &EmbeddingModel::seeded, py::arg("dim"), py::arg("seed"),
                    py::arg("distance") = DistanceKind::cosine,
                    py::arg("normalize_output") = true, py::arg("bias_scale") = 0.1)
        .def("embed", &EmbeddingModel::embed)
        .def("distance", &EmbeddingModel::distance)
        .def("embedded_distance", &EmbeddingModel::embedded_distance);
    m.def("cosine_distance", &cosine_distance);
    m.def("l2_distance", &l2_distance);

    py::enum_<HeuristicKind>(m, "HeuristicKind")
        .value("id_star", HeuristicKind::id_star)
        .value("id_part", HeuristicKind::id_part)
        .value("id_diff", HeuristicKind::id_diff)
        .value("worst_case_l2", HeuristicKind::worst_case_l2)
        .value("worst_case_cos", HeuristicKind::worst_case_cos)
        .value("squared_target", HeuristicKind::squared_target);
    py::class_<Heuristic>(m, "Heuristic")
        .def(py::init<HeuristicKind, EmbeddingModel>(), py::arg("kind"), py::arg("embedding"))
        .def_static("toward_target", &Heuristic::toward_target)
        .def_property_readonly("kind", &Heuristic::kind)
        .def("value", &Heuristic::value)
        .def("grad_x", &Heuristic::grad_x);
    m.def("heuristic_grad_eps", &heuristic_grad_eps);

    py::class_<RAdamState>(m, "RAdamState")
        .def_readonly("step", &RAdamState::step)
        .def_readonly("first_moment", &RAdamState::first_moment)
        .def_readonly("second_moment", &RAdamState::second_moment)
        .def_readonly("lr", &RAdamState::lr)
        .def_readonly("beta0", &RAdamState::beta0)
        .def_readonly("beta1", &RAdamState::beta1);
    m.def("make_radam_state", &make_radam_state, py::arg("dim"), py::arg("lr") = 0.01,
          py::arg("beta0") = 0.5, py::arg("beta1") = 0.9);
    m.def("radam_step",
          [](RAdamState& state, const Vec& grad, Vec param) {
              radam_step(state, grad, param);
              return param;
          },
          py::arg("state"), py::arg("grad"), py::arg("param"),
          "Returns the updated parameter; the state advances in place.");
    m.def("radam_rho", &radam_rho);
    m.def("radam_rectification_step", &radam_rectification_step);

    py::enum_<SearchMode>(m, "SearchMode")
        .value("discrete", SearchMode::discrete)
        .value("continuous_w", SearchMode::continuous_w)
        .value("epsilon_opt", SearchMode::epsilon_opt);
    py::class_<GreedyConfig>(m, "GreedyConfig")
        .def(py::init<>())
        .def_readwrite("n_opt", &GreedyConfig::n_opt)
        .def_readwrite("lr", &GreedyConfig::lr)
        .def_readwrite("beta0", &GreedyConfig::beta0)
        .def_readwrite("beta1", &GreedyConfig::beta1)
        .def_readwrite("opt_stride", &GreedyConfig::opt_stride)
        .def_readwrite("noise_level", &GreedyConfig::noise_level)
        .def_readwrite("blend_count", &GreedyConfig::blend_count)
        .def_readwrite("search_mode", &GreedyConfig::search_mode);

    m.def("dim_morph", &dim_morph, py::arg("pair"), py::arg("w") = 0.5,
          py::arg("config") = MorphConfig{});
    m.def("morph_pipe", &morph_pipe, py::arg("pair"), py::arg("blends"),
          py::arg("heuristic"), py::arg("config") = MorphConfig{});
    m.def("greedy_dim_s", &greedy_dim_s, py::arg("pair"), py::arg("heuristic"),
          py::arg("greedy") = GreedyConfig{.search_mode = SearchMode::discrete},
          py::arg("config") = MorphConfig{});
    m.def("greedy_w_continuous", &greedy_w_continuous, py::arg("pair"), py::arg("heuristic"),
          py::arg("greedy") = GreedyConfig{.search_mode = SearchMode::continuous_w},
          py::arg("config") = MorphConfig{});
    m.def("greedy_dim_star", &greedy_dim_star, py::arg("pair"), py::arg("heuristic"),
          py::arg("greedy") = GreedyConfig{}, py::arg("config") = MorphConfig{});

    m.def("mmpmr",
          [](const std::vector<std::vector<double>>& rows, double delta) {
              return mmpmr(table_from_rows(rows), delta);
          },
          py::arg("rows"), py::arg("delta"));
    m.def("map_1c",
          [](const std::vector<std::vector<std::vector<double>>>& tables,
             const std::vector<double>& deltas) {
              std::vector<SimilarityTable> ts;
              ts.reserve(tables.size());
              for (const auto& rows : tables) {
                  ts.push_back(table_from_rows(rows));
              }
              return map_1c(ts, deltas);
          },
          py::arg("tables"), py::arg("deltas"));
    m.def("threshold_at_fmr", &threshold_at_fmr, py::arg("impostor_scores"), py::arg("fmr"));
    m.def("transferability", &transferability);
    m.def("rsm", &rsm);

    m.def("default_config_json",
          []() { return experiment_config_to_json(default_experiment_config()).dump(2); });
    m.def("run_experiment_json",
          [](const std::string& config_json, const std::string& out_dir) {
              ExperimentConfig cfg =
                  experiment_config_from_json(nlohmann::json::parse(config_json));
              const ExperimentResult res = run_experiment(cfg);
              if (!out_dir.empty()) {
                  write_experiment_outputs(res, out_dir);
              }
              return py::make_tuple(format_csv(res), res.summary.dump(2));
          },
          py::arg("config_json"), py::arg("out_dir") = std::string(),
          "Runs the experiment; returns (csv_text, summary_json).");

    m.def("verify_suite",
          [](const std::string& selector) {
              std::vector<py::tuple> out;
              for (const CheckResult& c : verify_suite(selector)) {
                  out.push_back(py::make_tuple(c.name, c.passed, c.detail));
              }
              return out;
          },
          py::arg("selector") = "all");
}
