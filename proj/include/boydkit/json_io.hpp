#pragma once
// JSON schemas for functions, spaces, and transform kinds, plus the compact
// command-line spellings.  Parse failures throw ParseError naming the JSON
// path of the offending field; serialization spells infinities as "inf" and
// prints reals in shortest round-trip form.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "boydkit/hardy.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j,
                                        const std::string& path,
                                        const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw ParseError(path + ": missing field \"" + name + "\"");
  return j.at(name);
}

inline double json_real(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  throw ParseError(path + ": expected a real number or \"inf\"");
}

inline double real_member(const nlohmann::json& j, const std::string& path,
                          const char* name) {
  return json_real(json_field(j, path, name), path + "." + name);
}

inline double parse_real_token(const std::string& tok,
                               const std::string& path) {
  if (tok == "inf") return kInf;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(path + ": bad real '" + tok + "'");
  return v;
}

inline std::vector<double> parse_real_list(const std::string& body,
                                           std::size_t count,
                                           const std::string& path) {
  std::vector<double> vals;
  std::size_t at = 0;
  while (at <= body.size()) {
    const std::size_t comma = body.find(',', at);
    const std::string tok =
        body.substr(at, comma == std::string::npos ? comma : comma - at);
    vals.push_back(parse_real_token(tok, path));
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  if (vals.size() != count)
    throw ParseError(path + ": expected " + std::to_string(count) +
                     " comma-separated values");
  return vals;
}

}  // namespace detail

inline nlohmann::json real_to_json(double v) {
  if (std::isinf(v)) return nlohmann::json(v > 0.0 ? "inf" : "-inf");
  return nlohmann::json(v);
}

// ---------------------------------------------------------------------------
// Functions: {"pieces":[{"lo":0,"hi":1,"coef":1,"exp":0}, ...]}.  Pieces of
// rearrangement output that are only known through a distribution band use
// the extension {"lo","hi","band":{"A","terms":[{"B","gamma"}]},"tlo","thi"}.

inline PiecewiseFn function_from_json(const nlohmann::json& j) {
  const auto& arr = detail::json_field(j, "function", "pieces");
  if (!arr.is_array()) throw ParseError("pieces: expected an array");
  std::vector<Piece> ps;
  ps.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "pieces[" + std::to_string(i) + "]";
    const auto& pj = arr[i];
    if (!pj.is_object()) throw ParseError(at + ": expected an object");
    Piece pc;
    pc.lo = detail::real_member(pj, at, "lo");
    pc.hi = detail::real_member(pj, at, "hi");
    if (pj.contains("band")) {
      const auto& bj = pj.at("band");
      auto band = std::make_shared<ImplicitBand>();
      band->A = detail::real_member(bj, at + ".band", "A");
      const auto& terms = detail::json_field(bj, at + ".band", "terms");
      if (!terms.is_array() || terms.empty())
        throw ParseError(at + ".band.terms: expected a nonempty array");
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string tat = at + ".band.terms[" + std::to_string(k) + "]";
        band->terms.push_back({detail::real_member(terms[k], tat, "B"),
                               detail::real_member(terms[k], tat, "gamma")});
      }
      pc.band = std::move(band);
      pc.tlo = detail::real_member(pj, at, "tlo");
      pc.thi = detail::real_member(pj, at, "thi");
    } else {
      pc.coef = detail::real_member(pj, at, "coef");
      pc.exp = detail::real_member(pj, at, "exp");
      if (pc.coef < 0.0) throw ParseError(at + ".coef: must be nonnegative");
    }
    ps.push_back(std::move(pc));
  }
  try {
    return PiecewiseFn(std::move(ps));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("pieces: ") + e.what());
  }
}

inline nlohmann::json function_to_json(const PiecewiseFn& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& pc : f.pieces()) {
    nlohmann::json pj;
    pj["lo"] = real_to_json(pc.lo);
    pj["hi"] = real_to_json(pc.hi);
    if (pc.implicit()) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& tm : pc.band->terms)
        terms.push_back({{"B", real_to_json(tm.B)},
                         {"gamma", real_to_json(tm.gamma)}});
      pj["band"] = {{"A", real_to_json(pc.band->A)}, {"terms", terms}};
      pj["tlo"] = real_to_json(pc.tlo);
      pj["thi"] = real_to_json(pc.thi);
    } else {
      pj["coef"] = real_to_json(pc.coef);
      pj["exp"] = real_to_json(pc.exp);
    }
    arr.push_back(std::move(pj));
  }
  return nlohmann::json{{"pieces", std::move(arr)}};
}

// ---------------------------------------------------------------------------
// Spaces: {"lorentz":{"p":2,"q":1}} | {"sum":{"x":...,"y":...,"cutGrid":64}}
//         | {"holmstedt":{"x":...,"y":...}}.

inline SpaceSpec space_from_json(const nlohmann::json& j,
                                 const std::string& path = "space") {
  if (!j.is_object())
    throw ParseError(path + ": expected a space object");
  try {
    if (j.contains("lorentz")) {
      const auto& o = j.at("lorentz");
      const std::string at = path + ".lorentz";
      return SpaceSpec::lorentz(detail::real_member(o, at, "p"),
                                detail::real_member(o, at, "q"));
    }
    if (j.contains("sum")) {
      const auto& o = j.at("sum");
      const std::string at = path + ".sum";
      int cut_grid = 64;
      if (o.contains("cutGrid")) {
        if (!o.at("cutGrid").is_number_integer())
          throw ParseError(at + ".cutGrid: expected an integer");
        cut_grid = o.at("cutGrid").get<int>();
      }
      return SpaceSpec::sum(
          space_from_json(detail::json_field(o, at, "x"), at + ".x"),
          space_from_json(detail::json_field(o, at, "y"), at + ".y"),
          cut_grid);
    }
    if (j.contains("holmstedt")) {
      const auto& o = j.at("holmstedt");
      const std::string at = path + ".holmstedt";
      return SpaceSpec::holmstedt(
          space_from_json(detail::json_field(o, at, "x"), at + ".x"),
          space_from_json(detail::json_field(o, at, "y"), at + ".y"));
    }
  } catch (const InvalidSpec& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path + ": expected lorentz, sum, or holmstedt");
}

inline nlohmann::json space_to_json(const SpaceSpec& X) {
  switch (X.kind) {
    case SpaceSpec::Kind::Lorentz:
      return {{"lorentz", {{"p", real_to_json(X.p)}, {"q", real_to_json(X.q)}}}};
    case SpaceSpec::Kind::Sum:
      return {{"sum",
               {{"x", space_to_json(*X.x)},
                {"y", space_to_json(*X.y)},
                {"cutGrid", X.cut_grid}}}};
    case SpaceSpec::Kind::Holmstedt:
      return {{"holmstedt",
               {{"x", space_to_json(*X.x)}, {"y", space_to_json(*X.y)}}}};
  }
  throw InvalidSpec("space: unknown kind");
}

// ---------------------------------------------------------------------------
// Kinds: {"upper":{"p":2,"r":1}} | {"lower":{"q":"inf","r":1}}.

inline HardyKind kind_from_json(const nlohmann::json& j,
                                const std::string& path = "kind") {
  if (!j.is_object()) throw ParseError(path + ": expected a kind object");
  try {
    if (j.contains("upper")) {
      const auto& o = j.at("upper");
      const std::string at = path + ".upper";
      return HardyKind::upper(detail::real_member(o, at, "p"),
                              detail::real_member(o, at, "r"));
    }
    if (j.contains("lower")) {
      const auto& o = j.at("lower");
      const std::string at = path + ".lower";
      return HardyKind::lower(detail::real_member(o, at, "q"),
                              detail::real_member(o, at, "r"));
    }
  } catch (const InvalidSpec& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path + ": expected upper or lower");
}

inline nlohmann::json kind_to_json(const HardyKind& k) {
  if (k.upper_family())
    return {{"upper", {{"p", real_to_json(k.index)}, {"r", real_to_json(k.r)}}}};
  return {{"lower", {{"q", real_to_json(k.index)}, {"r", real_to_json(k.r)}}}};
}

// ---------------------------------------------------------------------------
// Compact spellings: lorentz:p,q | sum:p1,q1,p2,q2 | holmstedt:p1,q1,p2,q2
// for spaces, upper:p,r | lower:q,r for kinds; "inf" spells infinity.

inline SpaceSpec space_from_string(const std::string& s) {
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (head == "lorentz") {
      const auto v = detail::parse_real_list(body, 2, "space");
      return SpaceSpec::lorentz(v[0], v[1]);
    }
    if (head == "sum") {
      const auto v = detail::parse_real_list(body, 4, "space");
      return SpaceSpec::sum(SpaceSpec::lorentz(v[0], v[1]),
                            SpaceSpec::lorentz(v[2], v[3]));
    }
    if (head == "holmstedt") {
      const auto v = detail::parse_real_list(body, 4, "space");
      return SpaceSpec::holmstedt(SpaceSpec::lorentz(v[0], v[1]),
                                  SpaceSpec::lorentz(v[2], v[3]));
    }
  } catch (const InvalidSpec& e) {
    throw ParseError(std::string("space: ") + e.what());
  }
  throw ParseError("space: unknown spelling '" + s +
                   "' (want lorentz:p,q | sum:p1,q1,p2,q2 | "
                   "holmstedt:p1,q1,p2,q2)");
}

inline HardyKind kind_from_string(const std::string& s) {
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (head == "upper") {
      const auto v = detail::parse_real_list(body, 2, "kind");
      return HardyKind::upper(v[0], v[1]);
    }
    if (head == "lower") {
      const auto v = detail::parse_real_list(body, 2, "kind");
      return HardyKind::lower(v[0], v[1]);
    }
  } catch (const InvalidSpec& e) {
    throw ParseError(std::string("kind: ") + e.what());
  }
  throw ParseError("kind: unknown spelling '" + s +
                   "' (want upper:p,r | lower:q,r)");
}

}  // namespace boydkit
