#include "modglue/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "modglue/errors.hpp"

namespace modglue {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t as_index(const Json& j, const char* what) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0))
    throw ParseError(std::string(what) + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> index_list(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& e : j) out.push_back(as_index(e, what));
  return out;
}

Json matrices_to_json(const std::vector<CMatrix>& Ms) {
  Json a = Json::array();
  for (const auto& M : Ms) a.push_back(matrix_to_json(M));
  return a;
}

std::vector<CMatrix> matrices_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of matrices");
  std::vector<CMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

bool all_identity(const std::vector<CMatrix>& Ms) {
  for (const auto& M : Ms)
    if (M.rows() != M.cols() || M != CMatrix::Identity(M.rows(), M.cols())) return false;
  return true;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex entries are [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json matrix_to_json(const CMatrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("matrices are arrays of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return CMatrix(0, 0);
  if (!j[0].is_array()) throw ParseError("matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return M;
}

Json algebra_to_json(const FdCStarAlgebra& A) {
  if (!A.is_full()) throw InvalidInput("only full algebras are written to files");
  return Json{{"blocks", A.dims()}};
}

FdCStarAlgebra algebra_from_json(const Json& j) { return FdCStarAlgebra(index_list(field(j, "blocks"), "blocks")); }

Json cover_to_json(const ClosedCover& C) { return Json{{"sets", C.sets()}}; }

ClosedCover cover_from_json(const Json& j, std::size_t prim_size) {
  const auto& s = field(j, "sets");
  if (!s.is_array()) throw ParseError("sets: expected an array");
  std::vector<LabelSet> sets;
  for (const auto& e : s) sets.push_back(index_list(e, "cover set"));
  return ClosedCover(prim_size, std::move(sets));
}

Json module_to_json(const HilbertModule& X) { return Json{{"mult", X.mult()}}; }

HilbertModule module_from_json(const Json& j, const FdCStarAlgebra& A) {
  return HilbertModule(A, index_list(field(j, "mult"), "mult"));
}

Json gluing_to_json(const GluingDatum& D) {
  Json mods = Json::array();
  for (const auto& P : D.z.parts) mods.push_back(module_to_json(P));
  Json zeta = Json::array();
  for (const auto& e : transition_entries(D))
    zeta.push_back(Json{{"i", e.i}, {"j", e.j}, {"k", e.k}, {"matrix", matrix_to_json(e.matrix)}});
  return Json{{"modules", mods}, {"zeta", zeta}};
}

GluingDatum gluing_from_json(const Json& j, const FdCStarAlgebra& A, const ClosedCover& C) {
  const auto& mods = field(j, "modules");
  if (!mods.is_array() || mods.size() != C.size()) throw ParseError("modules: one entry per cover set required");
  SumAlgebraB B(A, C);
  std::vector<HilbertModule> parts;
  for (std::size_t i = 0; i < C.size(); ++i) parts.push_back(module_from_json(mods[i], B.part(i)));
  std::vector<TransitionEntry> entries;
  if (j.contains("zeta")) {
    const auto& z = j["zeta"];
    if (!z.is_array()) throw ParseError("zeta: expected an array");
    for (const auto& e : z)
      entries.push_back({as_index(field(e, "i"), "i"), as_index(field(e, "j"), "j"), as_index(field(e, "k"), "k"),
                         matrix_from_json(field(e, "matrix"))});
  }
  return make_gluing_datum(BModule(std::move(B), std::move(parts)), entries);
}

Json bimodule_to_json(const EquivalenceBimodule& M) {
  Json j{{"left_blocks", M.left.dims()}, {"right_blocks", M.right.dims()}, {"twist", matrices_to_json(M.left_twist)}};
  if (!all_identity(M.right_twist)) j["right_twist"] = matrices_to_json(M.right_twist);
  return j;
}

EquivalenceBimodule bimodule_from_json(const Json& j) {
  FdCStarAlgebra L(index_list(field(j, "left_blocks"), "left_blocks"));
  FdCStarAlgebra R(index_list(field(j, "right_blocks"), "right_blocks"));
  std::vector<CMatrix> w;
  if (j.contains("right_twist")) w = matrices_from_json(j["right_twist"]);
  return make_bimodule(std::move(L), std::move(R), matrices_from_json(field(j, "twist")), std::move(w));
}

Json bimodule_gluing_to_json(const BimoduleGluingDatum& D) {
  Json parts = Json::array();
  for (const auto& M : D.parts) {
    Json p{{"twist", matrices_to_json(M.left_twist)}};
    if (!all_identity(M.right_twist)) p["right_twist"] = matrices_to_json(M.right_twist);
    parts.push_back(std::move(p));
  }
  Json nu = Json::array();
  for (std::size_t i = 0; i < D.num_sets(); ++i)
    for (std::size_t j = 0; j < D.num_sets(); ++j) {
      const auto F = D.cover.overlap(i, j);
      const auto& T = D.transition(i, j);
      for (std::size_t b = 0; b < F.size(); ++b)
        nu.push_back(Json{{"i", i}, {"j", j}, {"k", F[b]}, {"left", matrix_to_json(T.left[b])},
                          {"right", matrix_to_json(T.right[b])}});
    }
  return Json{{"left_blocks", D.left_base.dims()}, {"right_blocks", D.right_base.dims()}, {"bimodules", parts},
              {"nu", nu}};
}

BimoduleGluingDatum bimodule_gluing_from_json(const Json& j, const ClosedCover& C) {
  FdCStarAlgebra L(index_list(field(j, "left_blocks"), "left_blocks"));
  FdCStarAlgebra R(index_list(field(j, "right_blocks"), "right_blocks"));
  const auto& parts = field(j, "bimodules");
  if (!parts.is_array() || parts.size() != C.size()) throw ParseError("bimodules: one entry per cover set required");
  BimoduleGluingDatum D{L, R, C, {}, {}};
  for (std::size_t i = 0; i < C.size(); ++i) {
    std::vector<CMatrix> w;
    if (parts[i].contains("right_twist")) w = matrices_from_json(parts[i]["right_twist"]);
    D.parts.push_back(make_bimodule(restrict_algebra(L, C.set(i)), restrict_algebra(R, C.set(i)),
                                    matrices_from_json(field(parts[i], "twist")), std::move(w)));
  }
  std::map<std::array<std::size_t, 3>, std::pair<CMatrix, CMatrix>> given;
  if (j.contains("nu")) {
    const auto& nu = j["nu"];
    if (!nu.is_array()) throw ParseError("nu: expected an array");
    for (const auto& e : nu) {
      std::array<std::size_t, 3> key{as_index(field(e, "i"), "i"), as_index(field(e, "j"), "j"),
                                     as_index(field(e, "k"), "k")};
      if (key[0] >= C.size() || key[1] >= C.size() || !contains(C.overlap(key[0], key[1]), key[2]))
        throw InvalidInput("nu entry outside the cover overlaps");
      if (!given.emplace(key, std::pair{matrix_from_json(field(e, "left")), matrix_from_json(field(e, "right"))}).second)
        throw InvalidInput("duplicate nu entry");
    }
  }
  const std::size_t N = C.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t jj = 0; jj < N; ++jj) {
      const auto F = C.overlap(i, jj);
      const auto Ni = D.part_on(i, F);
      BimoduleMap T;
      for (std::size_t b = 0; b < F.size(); ++b) {
        if (auto it = given.find({i, jj, F[b]}); it != given.end()) {
          T.left.push_back(it->second.first);
          T.right.push_back(it->second.second);
        } else if (auto jt = given.find({jj, i, F[b]}); jt != given.end()) {
          T.left.push_back(jt->second.first.adjoint());
          T.right.push_back(jt->second.second.adjoint());
        } else {
          const auto m = static_cast<Eigen::Index>(Ni.mult[b]);
          const auto n = static_cast<Eigen::Index>(Ni.right.dim(b));
          T.left.push_back(CMatrix::Identity(m, m));
          T.right.push_back(CMatrix::Identity(n, n));
        }
      }
      D.nu.push_back(std::move(T));
    }
  check_shapes(D);
  return D;
}

Json config_to_json(const GenConfig& cfg) {
  static const char* modes[] = {"coherent", "random_unitary", "prescribed_phases"};
  Json phases = Json::array();
  for (auto c : cfg.phases) phases.push_back(complex_to_json(c));
  return Json{{"seed", cfg.seed},
              {"max_blocks", cfg.max_blocks},
              {"max_block_dim", cfg.max_block_dim},
              {"max_cover_sets", cfg.max_cover_sets},
              {"max_mult", cfg.max_mult},
              {"twist_mode", modes[static_cast<int>(cfg.twist_mode)]},
              {"phases", phases}};
}

GenConfig config_from_json(const Json& j) {
  GenConfig cfg;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ParseError("seed: expected an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("max_blocks")) cfg.max_blocks = as_index(j["max_blocks"], "max_blocks");
  if (j.contains("max_block_dim")) cfg.max_block_dim = as_index(j["max_block_dim"], "max_block_dim");
  if (j.contains("max_cover_sets")) cfg.max_cover_sets = as_index(j["max_cover_sets"], "max_cover_sets");
  if (j.contains("max_mult")) cfg.max_mult = as_index(j["max_mult"], "max_mult");
  if (j.contains("twist_mode")) {
    const auto m = j["twist_mode"].get<std::string>();
    if (m == "coherent")
      cfg.twist_mode = TwistMode::coherent;
    else if (m == "random_unitary")
      cfg.twist_mode = TwistMode::random_unitary;
    else if (m == "prescribed_phases")
      cfg.twist_mode = TwistMode::prescribed_phases;
    else
      throw ParseError("unknown twist_mode " + m);
  }
  if (j.contains("phases")) {
    if (!j["phases"].is_array()) throw ParseError("phases: expected an array");
    for (const auto& c : j["phases"]) cfg.phases.push_back(complex_from_json(c));
  }
  check_config(cfg);
  return cfg;
}

Document parse_document(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be an object");
  Document doc;
  try {
    if (j.contains("generator")) doc.generator = config_from_json(j["generator"]);
    if (j.contains("algebra")) doc.algebra = algebra_from_json(j["algebra"]);
    std::optional<std::size_t> prim;
    if (doc.algebra) prim = doc.algebra->prim_size();
    if (j.contains("bimodule_gluing") && !prim)
      prim = index_list(field(j["bimodule_gluing"], "right_blocks"), "right_blocks").size();
    if (j.contains("cover")) {
      if (!prim) throw ParseError("cover needs an algebra");
      doc.cover = cover_from_json(j["cover"], *prim);
    }
    if (j.contains("module")) {
      if (!doc.algebra) throw ParseError("module needs an algebra");
      doc.module = module_from_json(j["module"], *doc.algebra);
    }
    if (j.contains("gluing")) {
      if (!doc.algebra || !doc.cover) throw ParseError("gluing needs an algebra and a cover");
      doc.gluing = gluing_from_json(j["gluing"], *doc.algebra, *doc.cover);
    }
    if (j.contains("bimodule")) doc.bimodule = bimodule_from_json(j["bimodule"]);
    if (j.contains("bimodule_gluing")) {
      if (!doc.cover) throw ParseError("bimodule_gluing needs a cover");
      doc.bimodule_gluing = bimodule_gluing_from_json(j["bimodule_gluing"], *doc.cover);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("schema error: ") + e.what());
  }
  return doc;
}

std::string serialize_document(const Document& doc) {
  Json j = Json::object();
  if (doc.generator) j["generator"] = config_to_json(*doc.generator);
  if (doc.algebra) j["algebra"] = algebra_to_json(*doc.algebra);
  if (doc.cover) j["cover"] = cover_to_json(*doc.cover);
  if (doc.module) j["module"] = module_to_json(*doc.module);
  if (doc.gluing) j["gluing"] = gluing_to_json(*doc.gluing);
  if (doc.bimodule) j["bimodule"] = bimodule_to_json(*doc.bimodule);
  if (doc.bimodule_gluing) j["bimodule_gluing"] = bimodule_gluing_to_json(*doc.bimodule_gluing);
  return j.dump(1) + "\n";
}

Document instance_document(const Instance& inst) {
  Document doc;
  doc.generator = inst.config;
  doc.algebra = inst.algebra;
  doc.cover = inst.cover;
  doc.module = inst.module;
  doc.gluing = inst.datum;
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << contents;
  if (!out) throw ParseError("write failed for " + path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_fingerprint(std::string_view bytes) {
  std::ostringstream ss;
  ss << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
  return ss.str();
}

std::string config_fingerprint(const GenConfig& cfg) { return config_to_json(cfg).dump(); }

Report make_report(std::string check, double max_residual, double tol, std::string fingerprint, double wall_time,
                   Json details, std::optional<bool> structural) {
  Report r;
  r.check = std::move(check);
  r.max_residual = max_residual;
  r.tol = tol;
  r.fingerprint = std::move(fingerprint);
  r.wall_time = wall_time;
  r.details = std::move(details);
  r.pass = max_residual <= tol && (!structural || *structural);
  return r;
}

std::string report_line(const Report& r) {
  Json j{{"check", r.check},        {"pass", r.pass},           {"max_residual", r.max_residual},
         {"tol", r.tol},            {"fingerprint", r.fingerprint}, {"wall_time", r.wall_time},
         {"details", r.details}};
  return j.dump();
}

}  // namespace modglue
