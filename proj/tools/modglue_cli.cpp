#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modglue/modglue.hpp"

using namespace modglue;

namespace {

enum Exit { kPass = 0, kInputError = 1, kCheckFailure = 2, kParseError = 3 };

struct Options {
  std::string in;
  std::string out;
  std::string write;
  std::string coeff;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 200;
  double tol = 1e-9;
  std::string mode = "coherent";
  std::vector<double> phases;
  std::string kind = "module";
  int criterion = 0;
};

class Session {
 public:
  explicit Session(const Options& o) : opt_(o) {}

  void emit(const Report& r) {
    all_pass_ = all_pass_ && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << "  max_residual=" << r.max_residual << "  tol=" << r.tol
              << "\n";
    lines_ += report_line(r) + "\n";
  }
  void check(const std::string& name, double residual, Json details = Json::object(),
             std::optional<bool> structural = std::nullopt, std::optional<double> tol = std::nullopt) {
    emit(make_report(name, residual, tol.value_or(opt_.tol), fingerprint_, elapsed(), std::move(details), structural));
  }
  int finish() {
    if (!opt_.out.empty()) write_file(opt_.out, lines_);
    return all_pass_ ? kPass : kCheckFailure;
  }
  void set_fingerprint(std::string f) { fingerprint_ = std::move(f); }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  const Options& opt_;
  std::string fingerprint_;
  std::string lines_;
  bool all_pass_ = true;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

TwistMode parse_mode(const std::string& m) {
  if (m == "coherent") return TwistMode::coherent;
  if (m == "random_unitary" || m == "twisted") return TwistMode::random_unitary;
  if (m == "prescribed_phases") return TwistMode::prescribed_phases;
  throw InvalidInput("unknown twist mode " + m);
}

GenConfig config_from(const Options& o) {
  GenConfig cfg;
  cfg.seed = o.seed.value_or(0);
  cfg.twist_mode = parse_mode(o.mode);
  if (o.phases.size() % 2 != 0) throw InvalidInput("--phases takes re,im pairs");
  for (std::size_t p = 0; p < o.phases.size(); p += 2) cfg.phases.emplace_back(o.phases[p], o.phases[p + 1]);
  check_config(cfg);
  return cfg;
}

// The input document, from --in or generated from --seed.
Document load(const Options& o, Session& s) {
  if (!o.in.empty()) {
    const std::string bytes = read_file(o.in);
    s.set_fingerprint(file_fingerprint(bytes));
    return parse_document(bytes);
  }
  if (!o.seed) throw InvalidInput("give --in or --seed");
  const GenConfig cfg = config_from(o);
  s.set_fingerprint(config_fingerprint(cfg));
  return instance_document(random_instance(cfg));
}

template <class T>
const T& need(const std::optional<T>& v, const char* what) {
  if (!v) throw InvalidInput(std::string("input lacks a ") + what + " section");
  return *v;
}

void write_document(const Options& o, const Document& d) {
  if (!o.write.empty()) write_file(o.write, serialize_document(d));
}

int cmd_validate(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  bool any = false;
  if (d.gluing) {
    any = true;
    const auto v = validate_gluing_datum(*d.gluing, o.tol);
    s.check("gluing.unitary", v.unitary_residual);
    s.check("gluing.identity", v.identity_residual);
    s.check("gluing.involution", v.involution_residual);
    s.check("gluing.cocycle", v.cocycle_residual);
  }
  if (d.bimodule) {
    any = true;
    const auto v = validate_bimodule(*d.bimodule, o.tol);
    s.check("bimodule.axioms", std::max({v.twist_residual, v.compatibility_residual, v.axiom_residual}),
            Json{{"left_full", v.left_full}, {"right_full", v.right_full}, {"left_action_defined", v.left_action_defined}},
            v.left_full && v.right_full && v.left_action_defined && v.aligned);
  }
  if (d.bimodule_gluing) {
    any = true;
    const auto v = validate_bimodule_datum(*d.bimodule_gluing, o.tol);
    s.check("bimodule_gluing.parts", 0.0, Json::object(), v.parts_valid);
    s.check("bimodule_gluing.maps", v.map_residual);
    s.check("bimodule_gluing.identity", v.identity_residual);
    s.check("bimodule_gluing.involution", v.involution_residual);
    s.check("bimodule_gluing.cocycle", v.cocycle_residual);
  }
  if (!any && d.module) {
    any = true;
    s.check("module", 0.0, Json{{"dimension", d.module->dimension()}});
  }
  if (!any) throw InvalidInput("nothing to validate");
  return s.finish();
}

int cmd_pullapart(const Options& o) {
  Session s(o);
  Document d = load(o, s);
  const auto& X = need(d.module, "module");
  const auto& C = need(d.cover, "cover");
  d.gluing = pull_apart(X, C);
  const auto v = validate_gluing_datum(*d.gluing, o.tol);
  s.check("pullapart.unitary", v.unitary_residual);
  s.check("pullapart.cocycle", v.cocycle_residual);
  write_document(o, d);
  return s.finish();
}

Json mult_json(const HilbertModule& X) { return Json(X.mult()); }

int cmd_glue(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  const auto& D = need(d.gluing, "gluing");
  const GluedModule G = glue(D);
  double iso = 0;
  for (std::size_t b = 0; b < G.sets.size(); ++b)
    for (std::size_t i : G.sets[b]) {
      const CMatrix E = G.slice(G.module.algebra().label(b), i);
      iso = std::max(iso, op_norm(E.adjoint() * E - CMatrix::Identity(E.cols(), E.cols())));
    }
  s.check("glue.embedding_isometric", iso, Json{{"glued_mult", mult_json(G.module)}});
  Document out;
  out.algebra = G.module.algebra();
  out.module = G.module;
  write_document(o, out);
  return s.finish();
}

int cmd_roundtrip(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  if (d.module && d.cover) {
    const PhiIso P = phi_iso(*d.module, *d.cover);
    s.check("roundtrip.phi_unitary", unitarity_residual(P.phi));
    SplitMix64 rng(o.seed.value_or(0) ^ 0xA5A5A5A5ULL);
    const HilbertModule Y = random_module(rng, *d.algebra, 5);
    AdjointableMap a = random_map(rng, *d.module, Y);
    a = Complex(1.0 / map_norm(a)) * a;
    const PhiIso PY = phi_iso(Y, *d.cover);
    const auto Ga = glue_morphism(pull_apart_map(a, *d.cover), P.datum, P.glued, PY.datum, PY.glued);
    s.check("roundtrip.phi_natural", map_distance(compose(PY.phi, a), compose(Ga, P.phi)));
  }
  if (d.gluing) {
    const GluedModule G = glue(*d.gluing);
    const EpsilonIso e = epsilon_iso(*d.gluing, G, o.tol);
    Json deficit(e.deficit);
    s.check("roundtrip.epsilon_unitary", e.unitary_residual, Json{{"deficit", deficit}});
    s.check("roundtrip.epsilon_intertwining", e.intertwining_residual);
  }
  return s.finish();
}

int cmd_descent(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  const auto& D = need(d.gluing, "gluing");
  const GluedModule G = glue(D);
  SplitMix64 rng(o.seed.value_or(0) ^ 0x5A5A5A5AULL);
  std::vector<BVector> samples;
  for (int q = 0; q < 3; ++q) samples.push_back(random_bvector(rng, D.z));
  const auto rep = descent_identities_check(D, G, samples);
  s.check("descent.counit", rep.counit_residual);
  s.check("descent.coassociativity", rep.coassociativity_residual);
  s.check("descent.kernel", rep.kernel_angle, Json{{"kernel_dim", rep.kernel_dim}, {"glued_dim", rep.glued_dim}},
          rep.kernel_dim == rep.glued_dim);
  s.check("descent.tensor_kernel", rep.tensor_kernel_angle,
          Json{{"kernel_dim", rep.tensor_kernel_dim}, {"glued_dim", rep.glued_tensor_dim}},
          rep.tensor_kernel_dim == rep.glued_tensor_dim);
  return s.finish();
}

int cmd_morita_glue(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  const auto& D = need(d.bimodule_gluing, "bimodule_gluing");
  const auto R = glue_bimodules(D, o.tol);
  Json details{{"glued_mult", mult_json(R.glued.module)}};
  if (!R.diagnostic.empty()) details["diagnostic"] = R.diagnostic;
  const auto& v = R.validation;
  s.check("morita_glue.bimodule",
          R.bimodule ? std::max({v.twist_residual, v.compatibility_residual, v.axiom_residual, R.action_consistency})
                     : std::numeric_limits<double>::infinity(),
          details, R.bimodule && v.passes(o.tol));
  if (R.bimodule) {
    Document out;
    out.bimodule = *R.bimodule;
    write_document(o, out);
  }
  return s.finish();
}

int cmd_obstruction(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  const auto& D = need(d.bimodule_gluing, "bimodule_gluing");
  const auto f = obstruction_2cocycle(D, o.tol);
  Json values = Json::array();
  for (const auto& [key, v] : f)
    if (key[0] < key[1] && key[1] < key[2])
      values.push_back(Json{{"i", key[0]}, {"j", key[1]}, {"l", key[2]}, {"k", key[3]}, {"f", complex_to_json(v)}});
  s.check("obstruction.cech", cech_coboundary_residual(f, D.cover), Json{{"f", values}});
  return s.finish();
}

int cmd_picard(const Options& o) {
  Session s(o);
  const Document d = load(o, s);
  const auto& D = need(d.bimodule_gluing, "bimodule_gluing");
  BimoduleGluingDatum M;
  if (!o.coeff.empty()) {
    M = need(parse_document(read_file(o.coeff)).bimodule_gluing, "bimodule_gluing");
  } else {
    M = pull_apart_bimodule(identity_bimodule(D.left_base), D.cover);
  }
  const auto C = picard_conjugate(D, M);
  const auto v = validate_bimodule_datum(C, o.tol);
  s.check("picard_conjugate.cocycle", v.cocycle_residual);
  s.check("picard_conjugate.valid", std::max({v.map_residual, v.identity_residual, v.involution_residual}),
          Json::object(), v.parts_valid);
  Document out;
  out.cover = C.cover;
  out.bimodule_gluing = C;
  write_document(o, out);
  return s.finish();
}

int cmd_gen(const Options& o) {
  const GenConfig cfg = config_from(o);
  Document d;
  if (o.kind == "module") {
    d = instance_document(random_instance(cfg));
  } else if (o.kind == "bimodule") {
    SplitMix64 rng(cfg.seed);
    const auto A = random_algebra(rng, cfg.max_blocks, cfg.max_block_dim);
    const auto Ap = random_partner_algebra(rng, A, cfg.max_block_dim);
    const auto C = random_cover(rng, A.prim_size(), cfg.max_cover_sets);
    d.generator = cfg;
    d.cover = C;
    d.bimodule_gluing = random_bimodule_datum(rng, Ap, A, C, cfg.twist_mode != TwistMode::coherent);
  } else {
    throw InvalidInput("--kind is module or bimodule");
  }
  const std::string text = serialize_document(d);
  if (o.write.empty())
    std::cout << text;
  else
    write_file(o.write, text);
  return kPass;
}

int cmd_suite(const Options& o) {
  SuiteOptions so;
  so.seed = o.seed.value_or(1);
  so.trials = o.trials;
  Session s(o);
  s.set_fingerprint(Json{{"suite_seed", so.seed}, {"trials", so.trials}}.dump());
  std::vector<CriterionResult> results;
  if (o.criterion != 0)
    results.push_back(run_criterion(o.criterion, so));
  else
    results = run_suite(so);
  bool ok = true;
  std::string lines;
  for (const auto& r : results) {
    std::cout << format_result(r);
    ok = ok && r.pass();
    for (const auto& m : r.measures) {
      Report rep = make_report("c" + std::to_string(r.id) + ": " + m.label, m.residual, m.tol,
                               Json{{"suite_seed", so.seed}, {"trials", so.trials}}.dump(), r.wall_time,
                               Json{{"samples", m.samples}});
      lines += report_line(rep) + "\n";
    }
  }
  if (!o.out.empty()) write_file(o.out, lines);
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gluing Hilbert modules and equivalence bimodules over finite-dimensional C*-algebras"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("MODGLUE_TOL")) {
    try {
      o.tol = std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "MODGLUE_TOL is not a number\n";
      return kInputError;
    }
  }
  auto common = [&](CLI::App* c) {
    c->add_option("--in", o.in, "input JSON document");
    c->add_option("--out", o.out, "report file (JSON lines)");
    c->add_option("--write", o.write, "output document");
    c->add_option("--seed", o.seed, "generate the input from this seed");
    c->add_option("--mode", o.mode, "coherent | random_unitary | prescribed_phases");
    c->add_option("--phases", o.phases, "re,im pairs for prescribed_phases")->delimiter(',');
    c->add_option("--tol", o.tol, "tolerance (default 1e-9, env MODGLUE_TOL)");
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Cmd cmds[] = {
      {"validate", "validate a gluing datum, bimodule or bimodule datum", cmd_validate},
      {"pullapart", "pull a module apart along the cover", cmd_pullapart},
      {"glue", "glue a datum into a module", cmd_glue},
      {"roundtrip", "check Phi and epsilon", cmd_roundtrip},
      {"descent", "check the descent identities", cmd_descent},
      {"morita-glue", "glue a bimodule datum", cmd_morita_glue},
      {"obstruction", "compute the obstruction 2-cocycle", cmd_obstruction},
      {"picard-conjugate", "conjugate a coefficient datum (--coeff) by the input datum", cmd_picard},
      {"gen", "write a seeded random instance", cmd_gen},
      {"suite", "run the acceptance battery", cmd_suite},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    common(sub);
    if (std::string(c.name) == "picard-conjugate") sub->add_option("--coeff", o.coeff, "coefficient datum over (A',A')");
    if (std::string(c.name) == "gen") sub->add_option("--kind", o.kind, "module | bimodule");
    if (std::string(c.name) == "suite") {
      sub->add_option("--trials", o.trials, "instances per criterion (default 200)");
      sub->add_option("--criterion", o.criterion, "run a single criterion");
    }
    sub->callback([&selected, run = c.run] { selected = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInputError;
  }
  try {
    return selected(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const ResidualError& e) {
    std::cerr << "check failed: " << e.what() << " (residual " << e.residual() << ")\n";
    return kCheckFailure;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
}
