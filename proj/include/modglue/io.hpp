#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "modglue/gen.hpp"

namespace modglue {

// Malformed JSON or a document that does not match the schema.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
// Row-major nested rows of [re, im] pairs.
Json matrix_to_json(const CMatrix& M);
CMatrix matrix_from_json(const Json& j);

Json algebra_to_json(const FdCStarAlgebra& A);
FdCStarAlgebra algebra_from_json(const Json& j);
Json cover_to_json(const ClosedCover& C);
ClosedCover cover_from_json(const Json& j, std::size_t prim_size);
Json module_to_json(const HilbertModule& X);
HilbertModule module_from_json(const Json& j, const FdCStarAlgebra& A);

// Multiplicities of each set list that set's blocks in increasing label order.
Json gluing_to_json(const GluingDatum& D);
GluingDatum gluing_from_json(const Json& j, const FdCStarAlgebra& A, const ClosedCover& C);

Json bimodule_to_json(const EquivalenceBimodule& M);
EquivalenceBimodule bimodule_from_json(const Json& j);
Json bimodule_gluing_to_json(const BimoduleGluingDatum& D);
BimoduleGluingDatum bimodule_gluing_from_json(const Json& j, const ClosedCover& C);

Json config_to_json(const GenConfig& cfg);
GenConfig config_from_json(const Json& j);

// A file: any subset of the sections below. The gluing datum needs the
// algebra and cover; a bimodule gluing datum needs the cover.
struct Document {
  std::optional<GenConfig> generator;
  std::optional<FdCStarAlgebra> algebra;
  std::optional<ClosedCover> cover;
  std::optional<HilbertModule> module;
  std::optional<GluingDatum> gluing;
  std::optional<EquivalenceBimodule> bimodule;
  std::optional<BimoduleGluingDatum> bimodule_gluing;
};

// Schema violations raise ParseError; mathematically invalid content raises
// InvalidInput.
Document parse_document(std::string_view text);
std::string serialize_document(const Document& doc);
Document instance_document(const Instance& inst);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes);
std::string file_fingerprint(std::string_view bytes);
std::string config_fingerprint(const GenConfig& cfg);

struct Report {
  std::string check;
  bool pass = false;
  double max_residual = 0;
  double tol = 0;
  std::string fingerprint;
  double wall_time = 0;
  Json details = Json::object();
};

// pass = (max_residual <= tol), and also `structural` when given.
Report make_report(std::string check, double max_residual, double tol, std::string fingerprint, double wall_time,
                   Json details = Json::object(), std::optional<bool> structural = std::nullopt);
std::string report_line(const Report& r);

}  // namespace modglue
