#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "s3qd/logical.hpp"
#include "s3qd/verify.hpp"

namespace py = pybind11;
using namespace s3qd;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_py(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

Caps caps_from(const py::dict& d) {
  Caps c;
  for (auto [k, v] : d) {
    auto key = k.cast<std::string>();
    int n = v.cast<int>();
    if (n < 1) throw InputError("caps must be >= 1: " + key);
    if (key == "sign_flip") c.sign_flip = n;
    else if (key == "prep") c.prep = n;
    else if (key == "compare") c.compare = n;
    else if (key == "x_steps") c.x_steps = n;
    else throw InputError("unknown cap: " + key);
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "S3 quantum double simulator";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<LeakageError>(m, "LeakageError", PyExc_ValueError);

  m.def("mul", [](const std::string& g, const std::string& h) { return std::string(name(mul(parse_elem(g), parse_elem(h)))); });
  m.def("inv", [](const std::string& g) { return std::string(name(inv(parse_elem(g)))); });
  m.def("fuse", [](char a, char b) {
    std::string out;
    for (char c : fuse(a, b)) out += c;
    return out;
  }, "Fusion channels of two anyon letters, one character per channel.");
  m.def("quantum_dimension", [](char a) { return anyon(a).qdim; });
  m.def("anyon_letters", [] {
    std::string out;
    for (const auto& t : anyon_types()) out += t.letter;
    return out;
  });
  m.def("charge_transfer_prob", [](const std::string& irrep_label, const std::string& element) {
    return charge_transfer_prob(irrep(GroupKind::S3, irrep_label), class_of(parse_elem(element)));
  }, py::arg("irrep"), py::arg("element"));
  m.def("sign_flip_success", &sign_flip_success, py::arg("n"));

  m.def("census", [] {
    Census c = census_1x1_torus();
    json rows = json::object();
    for (const auto& r : c.rows) rows[std::string(class_name(r.flux))] = r.states;
    return to_py({{"ground", c.ground}, {"excited", c.single_particle}, {"rows", rows}});
  });

  m.def("verify", [](const std::string& suite, std::uint64_t seed, double tolerance, long trials, bool timing) {
    VerifyOptions o;
    o.seed = seed;
    o.tolerance = tolerance;
    o.trials = trials;
    o.timing = timing;
    py::gil_scoped_release nogil;
    json j = verify_suite(suite, o);
    py::gil_scoped_acquire gil;
    return to_py(j);
  }, py::arg("suite") = "algebra", py::arg("seed") = 1, py::arg("tolerance") = 1e-9, py::arg("trials") = 10000,
     py::arg("timing") = true);

  m.def("mc_protocols", &mc_protocols);
  m.def("mc", [](const std::string& protocol, long trials, std::uint64_t seed, const py::dict& caps) {
    Caps c = caps_from(caps);
    McResult r;
    {
      py::gil_scoped_release nogil;
      r = run_mc(protocol, trials, seed, c);
    }
    return to_py(r);
  }, py::arg("protocol"), py::arg("trials") = 10000, py::arg("seed") = 1, py::arg("caps") = py::dict());

  m.def("run_circuit", [](const py::object& circuit, const std::string& mode, std::uint64_t seed, const py::dict& caps) {
    if (mode != "exact" && mode != "sampled") throw InputError("mode is exact or sampled");
    Mode md = mode == "exact" ? Mode::Exact : Mode::Sampled;
    Circuit c = parse_circuit(from_py(circuit));
    return to_py(run_to_json(run_circuit(c, md, seed, caps_from(caps)), md));
  }, py::arg("circuit"), py::arg("mode") = "exact", py::arg("seed") = 1, py::arg("caps") = py::dict());

  m.def("ribbon_violations", [](int width, int height, const std::string& ribbon, const std::string& z, const std::string& v) {
    Lattice L(width, height, Boundary::Open);
    RibbonPath r = parse_ribbon(L, ribbon);
    WaveFunction psi = apply_ribbon({parse_elem(z), parse_elem(v)}, r, ground_state(L, Config(L.num_edges(), E)));
    json out{{"norm", psi.norm()}, {"flux", json::array()}, {"charge", json::array()}};
    if (psi.norm() > 1e-12) {
      psi.normalize();
      for (const auto& x : violations(psi)) out[x.kind == ViolationKind::Flux ? "flux" : "charge"].push_back(x.id);
    }
    return to_py(out);
  }, "Applies F^(z,v) along a ribbon (file text) to the ground state of an open patch.",
     py::arg("width"), py::arg("height"), py::arg("ribbon"), py::arg("z"), py::arg("v"));
}
