#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roelab/approximation.hpp"
#include "roelab/banded_operator.hpp"
#include "roelab/errors.hpp"
#include "roelab/localization.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/rigidity.hpp"
#include "roelab/vector_measure.hpp"

namespace roelab::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Text output with fixed float formatting

namespace detail {

inline void escape_into(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

inline void format_double(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "\"nan\"";
  } else if (std::isinf(v)) {
    out += v > 0 ? "\"inf\"" : "\"-inf\"";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
}

inline void write(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        escape_into(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) {
          out += flat ? ", " : ",";
          if (!flat) out += nl;
        }
        first = false;
        if (!flat) out += pad;
        write(out, e, indent, depth + 1);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Serializes with every double printed as %.17g, so identical values give identical bytes.
inline std::string dump(const Json& j, int indent = 2) {
  std::string out;
  detail::write(out, j, indent, 0);
  out += "\n";
  return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Json parse(const std::string& text, const std::string& what = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidInput("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw InvalidInput("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Field access

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bad field '") + key + "': " + e.what());
  }
}

inline Complex complex_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidInput("complex entry must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class Block>
Json block_json(const Block& b) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < b.cols(); ++k) row.push_back(Json::array({b(i, k).real(), b(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix block_from(const Json& j, std::size_t d) {
  if (!j.is_array() || j.size() != d) throw InvalidInput("block must have d rows");
  Matrix b(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!j[i].is_array() || j[i].size() != d) throw InvalidInput("block row must have d entries");
    for (std::size_t k = 0; k < d; ++k) b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from(j[i][k]);
  }
  return b;
}

inline std::size_t index_from(const Json& j, const char* key, std::size_t bound) {
  const auto v = field<long long>(j, key);
  if (v < 0 || static_cast<std::size_t>(v) >= bound) throw InvalidInput(std::string("index '") + key + "' out of range");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spaces, operators, measures, unitaries

inline Json to_json(const MetricSpace& s) {
  Json j;
  j["label"] = s.label();
  j["n"] = s.size();
  j["dist"] = s.distances();
  return j;
}

inline MetricSpace space_from_json(const Json& j) {
  const auto label = detail::field<std::string>(j, "label");
  const auto n = detail::field<std::size_t>(j, "n");
  try {
    if (j.contains("dist")) return MetricSpace::from_distances(label, n, detail::field<std::vector<double>>(j, "dist"));
    if (j.contains("edges")) {
      std::vector<Edge> edges;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InvalidInput("edge must be [i, j]");
        edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      }
      return MetricSpace::from_edges(label, n, edges);
    }
  } catch (const DomainError& e) {
    throw InvalidInput(e.what());
  } catch (const Json::exception& e) {
    throw InvalidInput(e.what());
  }
  throw InvalidInput("space needs 'dist' or 'edges'");
}

/// Nonzero blocks only.
inline Json to_json(const BandedOperator& a) {
  Json j;
  j["space_label"] = a.space().label();
  j["n"] = a.points();
  j["d"] = a.fiber_dim();
  Json blocks = Json::array();
  for (Point x = 0; x < a.points(); ++x)
    for (Point y = 0; y < a.points(); ++y) {
      const auto b = a.block(x, y);
      if (b.cwiseAbs().maxCoeff() == 0.0) continue;
      blocks.push_back(Json{{"x", x}, {"y", y}, {"block", detail::block_json(b)}});
    }
  j["blocks"] = std::move(blocks);
  return j;
}

inline BandedOperator operator_from_json(const Json& j, const SpacePtr& space) {
  const auto n = detail::field<std::size_t>(j, "n");
  const auto d = detail::field<std::size_t>(j, "d");
  if (n != space->size()) throw InvalidInput("operator size does not match its space");
  if (j.contains("space_label") && detail::field<std::string>(j, "space_label") != space->label()) {
    throw InvalidInput("operator space_label does not match the space");
  }
  if (d == 0) throw InvalidInput("fiber dimension must be >= 1");
  BandedOperator a = BandedOperator::zero(space, d);
  if (!j.contains("blocks") || !j.at("blocks").is_array()) throw InvalidInput("operator needs a 'blocks' array");
  for (const auto& b : j.at("blocks")) {
    const Point x = detail::index_from(b, "x", n);
    const Point y = detail::index_from(b, "y", n);
    a.block(x, y) = detail::block_from(b.at("block"), d);
  }
  return a;
}

inline Json to_json(const AtomicVectorMeasure& mu) {
  Json j;
  j["m"] = mu.dim();
  j["norm"] = to_string(mu.norm_kind());
  Json atoms = Json::array();
  for (std::size_t i = 0; i < mu.atom_count(); ++i) {
    const Eigen::VectorXd a = mu.atom(i);
    atoms.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

inline AtomicVectorMeasure measure_from_json(const Json& j) {
  const auto m = detail::field<std::size_t>(j, "m");
  NormKind norm = NormKind::l2;
  if (j.contains("norm")) {
    try {
      norm = parse_norm_kind(detail::field<std::string>(j, "norm"));
    } catch (const DomainError& e) {
      throw InvalidInput(e.what());
    }
  }
  const auto atoms = detail::field<std::vector<std::vector<double>>>(j, "atoms");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].size() != m) throw InvalidInput("atom " + std::to_string(k) + " does not have m entries");
    for (std::size_t i = 0; i < m; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = atoms[k][i];
  }
  return AtomicVectorMeasure(std::move(a), norm);
}

inline Eigen::VectorXd vector_from_json(const Json& j) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("target vector: ") + e.what());
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Json to_json(const SpatialUnitary& u) {
  Json j;
  j["source"] = to_json(u.source());
  j["target"] = to_json(u.target());
  j["d"] = u.fiber_dim();
  const auto d = static_cast<Eigen::Index>(u.fiber_dim());
  Json blocks = Json::array();
  for (Point y = 0; y < u.target().size(); ++y)
    for (Point x = 0; x < u.source().size(); ++x) {
      const auto b = u.matrix().block(static_cast<Eigen::Index>(y) * d, static_cast<Eigen::Index>(x) * d, d, d);
      if (b.cwiseAbs().maxCoeff() == 0.0) continue;
      blocks.push_back(Json{{"y", y}, {"x", x}, {"block", detail::block_json(b)}});
    }
  j["blocks"] = std::move(blocks);
  return j;
}

/// Throws InvalidInput if the matrix is not unitary within tolerance.
inline SpatialUnitary unitary_from_json(const Json& j) {
  if (!j.contains("source") || !j.contains("target")) throw InvalidInput("unitary needs 'source' and 'target'");
  const SpacePtr X = share(space_from_json(j.at("source")));
  const SpacePtr Y = share(space_from_json(j.at("target")));
  const auto d = detail::field<std::size_t>(j, "d");
  if (d == 0) throw InvalidInput("fiber dimension must be >= 1");
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(Y->size() * d), static_cast<Eigen::Index>(X->size() * d));
  if (!j.contains("blocks") || !j.at("blocks").is_array()) throw InvalidInput("unitary needs a 'blocks' array");
  for (const auto& b : j.at("blocks")) {
    const Point y = detail::index_from(b, "y", Y->size());
    const Point x = detail::index_from(b, "x", X->size());
    u.block(static_cast<Eigen::Index>(y) * dd, static_cast<Eigen::Index>(x) * dd, dd, dd) = detail::block_from(b.at("block"), d);
  }
  return SpatialUnitary(X, Y, d, std::move(u));
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const IndexSet& s) { return Json(s.members()); }

inline Json to_json(const HullMembership& h) {
  Json j;
  j["in_hull"] = h.in_hull;
  j["residual"] = h.residual;
  j["weights"] = std::vector<double>(h.weights.data(), h.weights.data() + h.weights.size());
  if (!h.in_hull) {
    j["separator"] = std::vector<double>(h.separator.data(), h.separator.data() + h.separator.size());
    j["margin"] = h.margin;
  }
  return j;
}

inline Json to_json(const RoundingResult& r) {
  Json j;
  j["subset"] = to_json(r.subset);
  j["error"] = r.error;
  j["bound"] = r.bound;
  j["bound_exact"] = r.bound_exact;
  j["completion_exhaustive"] = r.completion_exhaustive;
  j["target"] = std::vector<double>(r.target.data(), r.target.data() + r.target.size());
  j["achieved"] = std::vector<double>(r.achieved.data(), r.achieved.data() + r.achieved.size());
  j["weights"] = std::vector<double>(r.weights.data(), r.weights.data() + r.weights.size());
  Json trace = Json::array();
  for (const auto& s : r.fractional_trace) {
    trace.push_back(Json{{"fractional_before", s.fractional_before},
                         {"blocked_index", s.blocked_index},
                         {"step", s.step},
                         {"new_value", s.new_value}});
  }
  j["pivot_trace"] = std::move(trace);
  return j;
}

inline Json to_json(const std::vector<std::pair<double, double>>& table) {
  Json rows = Json::array();
  for (const auto& [r, w] : table) rows.push_back(Json::array({r, w}));
  return rows;
}

inline Json to_json(const CoarseMapReport& rep) {
  Json j;
  j["verdict"] = to_string(rep.verdict);
  if (!rep.reason.empty()) j["reason"] = rep.reason;
  j["f"] = rep.f.assignment();
  j["g"] = rep.g.assignment();
  j["coefficient_floor"] = rep.coefficient_floor;
  j["inverse_floor"] = rep.inverse_floor;
  j["closeness_fg"] = rep.closeness_fg;
  j["closeness_gf"] = rep.closeness_gf;
  j["expansion_table"] = to_json(rep.expansion_table);
  j["inverse_expansion_table"] = to_json(rep.inverse_expansion_table);
  if (rep.seven_eighths_measured) j["seven_eighths_measured"] = *rep.seven_eighths_measured;
  if (rep.fiber_projection_rank) j["fiber_projection_rank"] = *rep.fiber_projection_rank;
  return j;
}

inline Json to_json(const LemmaReport& rep) {
  Json j;
  j["epsilon"] = rep.epsilon;
  j["r"] = rep.r;
  j["delta"] = rep.delta;
  j["growth"] = rep.growth;
  j["tail_bound"] = rep.tail_bound;
  j["identity_defect"] = rep.identity_defect;
  j["min_norm"] = rep.min_norm;
  j["bound"] = rep.bound;
  j["pass"] = rep.pass;
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    pts.push_back(Json{{"x", p.x},
                       {"large", p.large},
                       {"norm", p.norm},
                       {"complement_norm", p.complement_norm},
                       {"halving_atoms", p.halving_atoms},
                       {"halving_error", p.halving_error},
                       {"halving_limit", p.halving_limit},
                       {"halving_within_limit", p.halving_within_limit}});
  }
  j["points"] = std::move(pts);
  return j;
}

inline Json to_json(const FloorBound& f) {
  return Json{{"epsilon", f.epsilon}, {"r", f.r}, {"growth", f.growth}, {"certified", f.certified}, {"measured", f.measured}};
}

inline Json to_json(const LocalizationParams& p) {
  return Json{{"epsilon", p.epsilon}, {"delta", p.delta}, {"s", p.s}, {"t", p.t},
              {"k", p.k},             {"gamma", p.gamma}, {"r", p.r}};
}

inline Json to_json(const LocalizationResult& r) {
  Json j;
  j["support"] = to_json(r.support);
  j["diameter"] = r.diameter;
  j["defect"] = r.defect;
  j["power_index"] = r.power_index;
  j["power_norms"] = r.power_norms;
  j["bound_r"] = r.bound_r;
  j["chain_diameter"] = r.chain_diameter;
  Json xi = Json::array();
  for (Eigen::Index i = 0; i < r.xi.size(); ++i) xi.push_back(Json::array({r.xi(i).real(), r.xi(i).imag()}));
  j["xi"] = std::move(xi);
  return j;
}

inline Json to_json(const GhostTransportReport& g) {
  return Json{{"source_profile", g.source_profile},
              {"image_profile", g.image_profile},
              {"source_tail", g.source_tail},
              {"image_tail", g.image_tail},
              {"source_nonvanishing", g.source_nonvanishing},
              {"image_nonvanishing", g.image_nonvanishing},
              {"prediction_consistent", g.prediction_consistent}};
}

/// Two-column CSV of an (r, omega) table.
inline std::string expansion_csv(const std::vector<std::pair<double, double>>& table, const char* name = "omega") {
  std::string out = std::string("r,") + name + "\n";
  for (const auto& [r, w] : table) {
    detail::format_double(out, r);
    out += ",";
    detail::format_double(out, w);
    out += "\n";
  }
  return out;
}

}  // namespace roelab::io
