// liespec command line: analyze / spectrum / verify / oracle / examples.
// Exit codes: 0 success; 1 usage or input parse problems; 2 instances the
// theory rejects (dependent generators, non-closed or non-solvable families);
// 3 numerical/tolerance failures (including failed verification checks).

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liespec/checks.hpp"
#include "liespec/corpus.hpp"
#include "liespec/generate.hpp"
#include "liespec/io.hpp"
#include "liespec/koszul.hpp"
#include "liespec/liealg.hpp"
#include "liespec/spectrum.hpp"

namespace {

using liespec::CMatrix;
using liespec::Complex;
using liespec::CVector;
using liespec::Index;
using liespec::Tolerances;
namespace io = liespec::io;
namespace liealg = liespec::liealg;
namespace spectrum = liespec::spectrum;
namespace checks = liespec::checks;

struct CommonOpts {
  double tol_rank = -1;
  double tol_cluster = -1;
  double tol_residual = -1;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--tol-rank", o.tol_rank, "relative rank cutoff (overrides the instance file)");
  cmd->add_option("--tol-cluster", o.tol_cluster, "eigenvalue clustering radius (overrides the instance file)");
  cmd->add_option("--tol-residual", o.tol_residual, "residual acceptance bound (overrides the instance file)");
  cmd->add_option("--format", o.format, "output format: json or text")->check(CLI::IsMember({"json", "text"}));
}

Tolerances resolve_tol(const io::Instance& inst, const CommonOpts& o) {
  Tolerances t = inst.has_tolerances ? inst.tol : Tolerances{};
  if (o.tol_rank > 0) t.rank_rel = o.tol_rank;
  if (o.tol_cluster > 0) t.eig_cluster = o.tol_cluster;
  if (o.tol_residual > 0) t.residual = o.tol_residual;
  liespec::validate(t);
  return t;
}

void emit(const io::Report& rep, const CommonOpts& o) {
  if (o.format == "text") {
    std::cout << rep.to_text();
  } else {
    std::cout << rep.to_json();
  }
}

io::ordered_json tol_json(const Tolerances& t) {
  io::ordered_json j;
  j["rank_rel"] = io::round_sig(t.rank_rel);
  j["eig_cluster"] = io::round_sig(t.eig_cluster);
  j["residual"] = io::round_sig(t.residual);
  return j;
}

io::ordered_json meta_json(const char* command, const io::Instance& inst, const Tolerances& tol) {
  io::ordered_json j;
  j["schema"] = "liespec-report-v1";
  j["command"] = command;
  j["instance"] = inst.name;
  j["space_dim"] = inst.family.space_dim;
  j["algebra_dim"] = inst.family.algebra_dim;
  j["tolerances"] = tol_json(tol);
  return j;
}

io::ordered_json sc_entries_json(const liealg::StructureConstants& sc, const std::vector<std::string>& labels) {
  io::ordered_json out = io::ordered_json::array();
  for (Index i = 0; i < sc.n; ++i) {
    for (Index j = i + 1; j < sc.n; ++j) {
      io::ordered_json e;
      e["left"] = labels[std::size_t(i)];
      e["right"] = labels[std::size_t(j)];
      e["coeffs"] = io::jcvec(sc.bracket_in_basis(i, j));
      out.push_back(e);
    }
  }
  return out;
}

io::ordered_json spectra_json(const std::vector<std::vector<Complex>>& spectra) {
  io::ordered_json out = io::ordered_json::array();
  for (const auto& s : spectra) {
    io::ordered_json row = io::ordered_json::array();
    for (const Complex& v : s) row.push_back(io::jcomplex(v));
    out.push_back(row);
  }
  return out;
}

int cmd_analyze(const std::string& path, const CommonOpts& o) {
  const io::Instance inst = io::load_instance(path);
  const Tolerances tol = resolve_tol(inst, o);
  const liealg::StructureConstants sc = liealg::verify_closure(inst.family, tol);
  const auto derived = liealg::derived_series(sc, tol);
  const auto lcs = liealg::lower_central_series(sc, tol);
  const liealg::AlgebraClass cls = liealg::classify(sc, tol);

  io::Report rep;
  rep.doc = meta_json("analyze", inst, tol);
  io::ordered_json cl;
  cl["class"] = liealg::to_string(cls);
  cl["derived_dims"] = derived.dims;
  cl["lower_central_dims"] = lcs.dims;
  rep.doc["classification"] = cl;
  rep.doc["structure_constants"] = sc_entries_json(sc, inst.family.labels);

  if (cls != liealg::AlgebraClass::non_solvable) {
    const liealg::JordanHolderFlag flag = liealg::jordan_holder_flag(inst.family, sc, tol);
    io::ordered_json fj;
    fj["k"] = flag.k;
    fj["nilpotent_shape"] = flag.nilpotent_shape;
    fj["ideal_dims"] = flag.ideal_dims;
    fj["change_of_basis"] = io::jcmat(flag.change_of_basis);
    fj["adapted_structure_constants"] = sc_entries_json(flag.adapted_sc, flag.adapted.labels);
    rep.doc["flag"] = fj;

    io::ordered_json wj = io::ordered_json::array();
    std::vector<std::vector<Complex>> comps;
    for (Index j = 1; j <= inst.family.algebra_dim; ++j) {
      io::ordered_json tj;
      tj["coordinate"] = j;
      io::ordered_json ents = io::ordered_json::array();
      for (const auto& [alpha, r] : spectrum::weights(flag.adapted_sc, j, tol).entries) {
        io::ordered_json e;
        e["tuple"] = alpha.to_string();
        e["weight"] = io::jcomplex(r);
        ents.push_back(e);
      }
      tj["entries"] = ents;
      wj.push_back(tj);
      comps.push_back(spectrum::component_spectrum(flag.adapted, flag.adapted_sc, j, tol));
    }
    rep.doc["weights"] = wj;
    rep.doc["component_spectra"] = spectra_json(comps);
  }
  emit(rep, o);
  return 0;
}

int cmd_spectrum(const std::string& path, const CommonOpts& o) {
  const io::Instance inst = io::load_instance(path);
  const Tolerances tol = resolve_tol(inst, o);
  const spectrum::SpectrumResult res = spectrum::joint_spectrum(inst.family, tol);

  io::Report rep;
  rep.doc = meta_json("spectrum", inst, tol);
  io::ordered_json fj;
  fj["k"] = res.flag.k;
  fj["nilpotent_shape"] = res.flag.nilpotent_shape;
  rep.doc["flag"] = fj;
  rep.doc["component_spectra"] = spectra_json(res.component_spectra);
  rep.doc["axes"] = spectra_json(res.axes);
  io::ordered_json pts = io::ordered_json::array();
  for (const auto& pt : res.points) {
    io::ordered_json pj;
    pj["input"] = io::jcvec(pt.input_coords);
    pj["adapted"] = io::jcvec(pt.adapted_coords);
    pj["betti"] = pt.betti;
    pts.push_back(pj);
  }
  rep.doc["points"] = pts;
  rep.doc["candidates_tested"] = res.candidates_tested;
  emit(rep, o);
  return 0;
}

int cmd_verify(const std::string& path, std::vector<std::string> names, const CommonOpts& o) {
  const io::Instance inst = io::load_instance(path);
  const Tolerances tol = resolve_tol(inst, o);
  if (names.empty()) names = checks::all_check_names();
  const std::vector<checks::CheckResult> results = checks::run_checks(inst.family, names, tol);

  io::Report rep;
  rep.doc = meta_json("verify", inst, tol);
  bool any_failed = false;
  io::ordered_json cj = io::ordered_json::array();
  for (const auto& r : results) {
    io::ordered_json e;
    e["check"] = r.name;
    e["status"] = r.status;
    if (!r.note.empty()) e["note"] = r.note;
    io::ordered_json mj;
    for (const auto& [key, val] : r.metrics) mj[key] = io::round_sig(val);
    e["metrics"] = mj;
    cj.push_back(e);
    any_failed = any_failed || r.failed();
  }
  rep.doc["checks"] = cj;
  rep.doc["all_passed"] = !any_failed;
  emit(rep, o);
  return any_failed ? 3 : 0;
}

int cmd_oracle(const std::string& path, const CommonOpts& o) {
  const io::Instance inst = io::load_instance(path);
  const Tolerances tol = resolve_tol(inst, o);
  const std::vector<CVector> pts = spectrum::taylor_oracle(inst.family, tol);

  io::Report rep;
  rep.doc = meta_json("oracle", inst, tol);
  io::ordered_json pj = io::ordered_json::array();
  for (const auto& t : pts) pj.push_back(io::jcvec(t));
  rep.doc["points"] = pj;
  emit(rep, o);
  return 0;
}

int cmd_examples_list(const CommonOpts& o) {
  if (o.format == "text") {
    for (const auto& e : liespec::corpus::entries()) {
      std::cout << e.name << ": " << e.description << "\n";
    }
  } else {
    io::ordered_json out = io::ordered_json::array();
    for (const auto& e : liespec::corpus::entries()) {
      io::ordered_json j;
      j["name"] = e.name;
      j["description"] = e.description;
      out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_examples_emit(const std::vector<std::string>& names, bool all, const std::string& dir) {
  std::vector<std::string> todo = names;
  if (all) {
    todo.clear();
    for (const auto& e : liespec::corpus::entries()) todo.push_back(e.name);
  }
  if (todo.empty()) throw liespec::ParseError("examples emit: name an example or pass --all");
  for (const std::string& name : todo) {
    const auto& e = liespec::corpus::get(name);
    const std::string path = dir + "/" + name + ".json";
    std::ofstream out(path);
    if (!out) throw liespec::ParseError("cannot write '" + path + "'");
    out << e.text << "\n";
    std::cout << path << "\n";
  }
  return 0;
}

int cmd_examples_gen(const std::string& kind, Index d, Index n, std::uint64_t seed, const std::string& out_path) {
  const liespec::gen::GeneratedInstance inst = liespec::gen::generate(kind, d, n, seed);
  io::ordered_json j = io::instance_json(inst.family, inst.name);
  if (!inst.expected_joint.empty()) {
    io::ordered_json ej = io::ordered_json::array();
    for (const auto& t : inst.expected_joint) ej.push_back(io::jcvec(t));
    j["expected_joint"] = ej;
  }
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw liespec::ParseError("cannot write '" + out_path + "'");
    out << text;
    std::cout << out_path << "\n";
  }
  return 0;
}

template <typename F>
int run_guarded(F&& f) {
  try {
    return f();
  } catch (const liespec::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const liespec::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const liespec::DegenerateBasisError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const liespec::NotClosedError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const liespec::ClassificationError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const liespec::HomotopyNotApplicable& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const liespec::SingularError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const liespec::ToleranceError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const liespec::CharacterError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const liespec::ShapeError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const liespec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint spectra of solvable families of matrices"};
  app.require_subcommand(1);

  std::string path;
  CommonOpts opts;

  CLI::App* an = app.add_subcommand("analyze", "classify a family and report its adapted structure");
  an->add_option("instance", path, "instance JSON file")->required();
  add_common(an, opts);

  CLI::App* sp = app.add_subcommand("spectrum", "compute the joint spectrum");
  sp->add_option("instance", path, "instance JSON file")->required();
  add_common(sp, opts);

  std::vector<std::string> check_names;
  CLI::App* ve = app.add_subcommand("verify", "run structural verification checks");
  ve->add_option("instance", path, "instance JSON file")->required();
  ve->add_option("--checks", check_names,
                 "comma-separated subset of dd,split,homotopy,thm1,thm2,projection,oracle (default: all)")
      ->delimiter(',');
  add_common(ve, opts);

  CLI::App* orc = app.add_subcommand("oracle", "joint eigenvalues of a commuting family by deflation");
  orc->add_option("instance", path, "instance JSON file")->required();
  add_common(orc, opts);

  CLI::App* ex = app.add_subcommand("examples", "built-in and generated instances");
  ex->require_subcommand(1);
  CLI::App* exl = ex->add_subcommand("list", "list built-in examples");
  add_common(exl, opts);

  std::vector<std::string> emit_names;
  bool emit_all = false;
  std::string emit_dir = ".";
  CLI::App* exe = ex->add_subcommand("emit", "write built-in examples as files");
  exe->add_option("names", emit_names, "example names");
  exe->add_flag("--all", emit_all, "emit every example");
  exe->add_option("--dir", emit_dir, "output directory (default .)");

  std::string gen_kind = "solvable";
  Index gen_d = 0, gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  CLI::App* exg = ex->add_subcommand("gen", "generate a seeded random instance");
  exg->add_option("--kind", gen_kind, "abelian, commuting, solvable, or nilpotent");
  exg->add_option("--dim", gen_d, "space dimension d")->required();
  exg->add_option("--n", gen_n, "algebra dimension n")->required();
  exg->add_option("--seed", gen_seed, "random seed");
  exg->add_option("--out", gen_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  return run_guarded([&]() -> int {
    if (an->parsed()) return cmd_analyze(path, opts);
    if (sp->parsed()) return cmd_spectrum(path, opts);
    if (ve->parsed()) return cmd_verify(path, check_names, opts);
    if (orc->parsed()) return cmd_oracle(path, opts);
    if (ex->parsed()) {
      if (exl->parsed()) return cmd_examples_list(opts);
      if (exe->parsed()) return cmd_examples_emit(emit_names, emit_all, emit_dir);
      if (exg->parsed()) return cmd_examples_gen(gen_kind, gen_d, gen_n, gen_seed, gen_out);
    }
    return 1;
  });
}
