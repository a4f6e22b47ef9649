#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbsim/channel.hpp"
#include "dbsim/config.hpp"
#include "dbsim/dma.hpp"
#include "dbsim/engine.hpp"
#include "dbsim/geometry.hpp"
#include "dbsim/metrics.hpp"
#include "dbsim/scheduler.hpp"
#include "dbsim/version.hpp"

namespace py = pybind11;
using namespace dbsim;

namespace {

ScenarioConfig config_from_kwargs(const py::kwargs& kwargs) {
    ScenarioConfig cfg;
    py::dict d = py::cast<py::dict>(py::module_::import("json").attr("loads")(config_to_json_text(cfg)));
    for (auto item : kwargs) {
        d[item.first] = item.second;
    }
    const std::string text =
        py::cast<std::string>(py::module_::import("json").attr("dumps")(d));
    return config_from_json_text(text);
}

py::dict summary_to_dict(const MetricsSummary& m) {
    py::dict d;
    d["time_avg_se"] = m.time_avg_se;
    d["time_avg_se_system"] = m.time_avg_se_system;
    d["jain"] = m.jain;
    d["mean_thp_bps"] = m.mean_thp_bps;
    d["p5_thp_bps"] = m.p5_thp_bps;
    d["completed_per_user"] = m.completed_per_user;
    d["tx_time_frac"] = m.tx_time_frac;
    d["outside_frac"] = m.outside_frac;
    d["mean_tau_s"] = m.mean_tau_s;
    return d;
}

} // namespace

PYBIND11_MODULE(_dbsim, m) {
    m.doc() = "Multi-cell drone base station network simulator";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<NoDataError>(m, "NoDataError");

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init([](const py::kwargs& kwargs) { return config_from_kwargs(kwargs); }))
        .def("validate", [](const ScenarioConfig& c) { return validate(c); })
        .def("to_json", &config_to_json_text)
        .def_static("from_json", &config_from_json_text)
        .def_readwrite("grid_side", &ScenarioConfig::grid_side)
        .def_readwrite("users_per_cell", &ScenarioConfig::users_per_cell)
        .def_readwrite("drone_speed", &ScenarioConfig::drone_speed)
        .def_readwrite("max_accel", &ScenarioConfig::max_accel)
        .def_readwrite("duration_s", &ScenarioConfig::duration_s)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def("__repr__", [](const ScenarioConfig& c) {
            return "<ScenarioConfig dma=" + std::string(to_string(c.dma)) +
                   " grid=" + std::to_string(c.grid_side) + "x" + std::to_string(c.grid_side) + ">";
        });

    m.def("ground_distance",
          [](double ux, double uy, double dx, double dy) {
              return ground_distance(GroundPoint{ux, uy}, GroundPoint{dx, dy});
          });
    m.def("euclidean_distance", &euclidean_distance);
    m.def("elevation_angle_deg", &elevation_angle_deg);
    m.def("max_turn_angle", &max_turn_angle);
    m.def("candidate_angles", &candidate_angles);
    m.def("los_probability", &los_probability);
    m.def("path_loss_db", [](double d, const std::string& path, const ScenarioConfig& cfg) {
        return path_loss_db(d, path == "LoS" ? PathType::Los : PathType::Nlos, cfg);
    });
    m.def("received_power_watt",
          [](double b_u, double d, const std::string& path, const ScenarioConfig& cfg) {
              return received_power_watt(b_u, d, path == "LoS" ? PathType::Los : PathType::Nlos,
                                         cfg);
          });
    m.def("noise_power_watt", &noise_power_watt);
    m.def("jain_index", [](const std::vector<double>& rates) {
        return jain_index(std::span<const double>(rates.data(), rates.size()));
    });
    m.def("percentile", &percentile);

    m.def(
        "run",
        [](const ScenarioConfig& cfg) {
            RunResult result;
            {
                py::gil_scoped_release release;
                result = run(cfg);
            }
            py::dict d = summary_to_dict(summarize(result));
            d["epochs"] = result.epochs;
            d["recorded_ticks"] = result.recorded_ticks;
            d["packets"] = result.packets.size();
            d["gt_converged_epochs"] = result.gt_converged_epochs;
            return d;
        },
        py::arg("config"), "Run one simulation and return its metric summary");

    m.def(
        "run_batch",
        [](const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds, int threads) {
            const std::vector<RunResult> results = run_batch(cfg, seeds, threads);
            std::vector<MetricsSummary> summaries;
            summaries.reserve(results.size());
            for (const auto& r : results) {
                summaries.push_back(summarize(r));
            }
            const BatchSummary agg = summarize_batch(summaries);
            py::list per_seed;
            for (const auto& s : summaries) {
                per_seed.append(summary_to_dict(s));
            }
            py::dict d;
            d["per_seed"] = per_seed;
            d["mean"] = summary_to_dict(agg.mean);
            d["std"] = summary_to_dict(agg.stddev);
            return d;
        },
        py::arg("config"), py::arg("seeds"), py::arg("threads") = 1,
        "Run the same scenario under several seeds");
}
