// Python bindings. Structured values cross the boundary as JSON text;
// edgeagent/__init__.py decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"
#include "edgeagent/host/runtime.hpp"

namespace py = pybind11;
using namespace edgeagent;
using nlohmann::json;

namespace {

json observation_json(sim::Device& d) {
  if (!d.foreground()) return {{"foreground", nullptr}};
  return {{"foreground", sim::to_json(d.snapshot())}};
}

class PyRuntime {
 public:
  PyRuntime(const std::string& scenario_path, std::optional<std::string> root)
      : scenario_(host::load_scenario(scenario_path)), rt_(scenario_, options(root)) {}

  std::string run_script() { return host::to_json(host::run_script(scenario_, rt_)).dump(); }

  std::string query(const std::string& text, const std::string& session, const std::string& source) {
    auto src = host::parse_source(source);
    if (!src) throw Error(Errc::InvalidArgument, "unknown source: " + source);
    TriggerEvent ev;
    ev.source = *src;
    ev.timestamp = rt_.device().clock();
    ev.session_id = session;
    ev.payload = text;
    rt_.ingress().submit(ev);
    json turns = json::array();
    for (const auto& t : rt_.orchestrator().drain(rt_.ingress())) turns.push_back(agent::to_json(t));
    return turns.dump();
  }

  std::string observation() { return observation_json(rt_.device()).dump(); }

  bool gesture(const std::string& gesture_json) {
    return rt_.device().apply_gesture(sim::gesture_from_json(json::parse(gesture_json))).changed;
  }

  void record_start(const std::string& session) { rt_.recorder().start(session); }

  std::string record_stop(const std::string& session, std::optional<std::string> name) {
    auto r = rt_.clone(session, name);
    return json{{"trajectory", clone::to_json(r.trajectory)},
                {"trace_id", r.trace_id},
                {"skill", host::to_json(r.card)},
                {"bookmark", host::to_json(r.bookmark)}}
        .dump();
  }

  std::string replay(const std::string& bookmark) { return host::to_json(rt_.replay(bookmark)).dump(); }

  std::string memory() { return host::to_json(rt_.gallery().load()).dump(); }

  std::string state_digest() const { return rt_.device().state_digest(); }
  std::string root() const { return rt_.root().string(); }
  bool model_enabled() const { return rt_.model_enabled(); }

 private:
  static host::RuntimeOptions options(const std::optional<std::string>& root) {
    host::RuntimeOptions o;
    if (root) o.root = *root;
    o.model = host::ModelEndpointConfig::from_env();
    return o;
  }

  host::Scenario scenario_;
  mutable host::Runtime rt_;
};

std::string parse_dump(const std::string& text) {
  auto p = clone::parse_dump(text);
  json records = json::array();
  for (const auto& r : p.records)
    records.push_back({{"app_id", r.app_id}, {"activity", r.activity}, {"block", r.block}, {"intent", sim::to_json(r.intent)}});
  return json{{"records", records}, {"warnings", p.warnings}}.dump();
}

}  // namespace

PYBIND11_MODULE(_edgeagent, m) {
  m.doc() = "Edge agent runtime over a simulated handset";

  py::exception<Error>(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::module_::import("edgeagent._edgeagent").attr("Error");
      py::object exc = type(e.what());
      exc.attr("code") = errc_name(e.code());
      PyErr_SetObject(type.ptr(), exc.ptr());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<PyRuntime>(m, "Runtime")
      .def(py::init<const std::string&, std::optional<std::string>>(), py::arg("scenario"),
           py::arg("root") = py::none())
      .def("run_script", &PyRuntime::run_script)
      .def("query", &PyRuntime::query, py::arg("text"), py::arg("session") = "default", py::arg("source") = "ui")
      .def("observation", &PyRuntime::observation)
      .def("gesture", &PyRuntime::gesture, py::arg("gesture"))
      .def("record_start", &PyRuntime::record_start, py::arg("session") = "default")
      .def("record_stop", &PyRuntime::record_stop, py::arg("session") = "default", py::arg("name") = py::none())
      .def("replay", &PyRuntime::replay, py::arg("bookmark"))
      .def("memory", &PyRuntime::memory)
      .def("state_digest", &PyRuntime::state_digest)
      .def_property_readonly("root", &PyRuntime::root)
      .def_property_readonly("model_enabled", &PyRuntime::model_enabled);

  m.def("parse_dump", &parse_dump, py::arg("text"));
}
