#pragma once

// JSON manifests for cohomology models and ring maps.
//
//   space: {"name", "dimension",
//           "groups": {"<degree>": {"free": [...],
//                                    "torsion": [{"label", "order"}]}},
//           "products": [{"left", "right", "result": {"<label>": coef}}],
//           "orientation": {"class", "value"}}
//   map:   {"name", "source", "target", "matrices": {"<degree>": [[...]]}}
//
// Integers of any size are accepted; integers outside the int64 range are
// emitted as decimal strings.

#include <charconv>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ctrace/error.hpp"
#include "ctrace/graded_ring.hpp"

namespace ctrace::manifest {

using json = nlohmann::json;

namespace detail {

constexpr const char *big_tag = "$bigint";

inline bool integer_token(std::string_view s) {
  if (!s.empty() && s.front() == '-')
    s.remove_prefix(1);
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

// DOM builder that keeps overflowing integer literals exactly.
class ExactSax {
public:
  using number_integer_t = json::number_integer_t;
  using number_unsigned_t = json::number_unsigned_t;
  using number_float_t = json::number_float_t;
  using string_t = json::string_t;
  using binary_t = json::binary_t;

  explicit ExactSax(json &root) : root_(root) {}

  bool null() { return put(nullptr); }
  bool boolean(bool v) { return put(v); }
  bool number_integer(number_integer_t v) { return put(v); }
  bool number_unsigned(number_unsigned_t v) { return put(v); }
  bool number_float(number_float_t, const string_t &s) {
    if (!integer_token(s)) {
      error_ = "non-integer number '" + s + "'";
      return false;
    }
    return put(json{{big_tag, s}});
  }
  bool string(string_t &v) { return put(v); }
  bool binary(binary_t &) {
    error_ = "binary values are not supported";
    return false;
  }
  bool start_object(std::size_t) {
    stack_.push_back(put_ref(json::object()));
    return true;
  }
  bool key(string_t &k) {
    key_ = k;
    return true;
  }
  bool end_object() {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    stack_.push_back(put_ref(json::array()));
    return true;
  }
  bool end_array() {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string &,
                   const nlohmann::detail::exception &e) {
    error_ = e.what();
    return false;
  }

  const std::string &error() const { return error_; }

private:
  json *put_ref(json v) {
    if (stack_.empty()) {
      root_ = std::move(v);
      return &root_;
    }
    json &top = *stack_.back();
    if (top.is_array()) {
      top.push_back(std::move(v));
      return &top.back();
    }
    top[key_] = std::move(v);
    return &top[key_];
  }
  bool put(json v) {
    put_ref(std::move(v));
    return true;
  }

  json &root_;
  std::vector<json *> stack_;
  std::string key_;
  std::string error_;
};

} // namespace detail

/// Parses JSON text, keeping integers of any size exact.
inline json parse_json(std::string_view text) {
  json root;
  detail::ExactSax sax(root);
  const bool ok = json::sax_parse(text.begin(), text.end(), &sax);
  if (!ok)
    throw InputError("malformed JSON: " + sax.error());
  return root;
}

inline Integer to_integer(const json &j, std::string_view what) {
  if (j.is_number_integer())
    return j.is_number_unsigned() ? Integer(j.get<std::uint64_t>())
                                  : Integer(j.get<std::int64_t>());
  if (j.is_object() && j.size() == 1 && j.contains(detail::big_tag))
    return Integer(j[detail::big_tag].get<std::string>());
  throw InputError(std::string(what) + " must be an integer");
}

inline json from_integer(const Integer &x) {
  if (x >= std::numeric_limits<std::int64_t>::min() &&
      x <= std::numeric_limits<std::int64_t>::max())
    return json(static_cast<std::int64_t>(x));
  return json(x.str());
}

namespace detail {

inline const json &field(const json &obj, const char *key,
                         std::string_view where) {
  if (!obj.is_object() || !obj.contains(key))
    throw InputError(std::string(where) + ": missing field \"" + key + "\"");
  return obj.at(key);
}

inline std::string string_field(const json &obj, const char *key,
                                std::string_view where) {
  const auto &v = field(obj, key, where);
  if (!v.is_string())
    throw InputError(std::string(where) + ": \"" + key +
                     "\" must be a string");
  return v.get<std::string>();
}

inline void only_keys(const json &obj, std::set<std::string> allowed,
                      std::string_view where) {
  if (!obj.is_object())
    throw InputError(std::string(where) + " must be an object");
  for (const auto &[k, v] : obj.items())
    if (!allowed.count(k))
      throw InputError(std::string(where) + ": unknown field \"" + k + "\"");
}

inline int degree_key(const std::string &k, int dimension,
                      std::string_view where) {
  int d = -1;
  auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), d);
  if (ec != std::errc() || p != k.data() + k.size())
    throw InputError(std::string(where) + ": degree key \"" + k +
                     "\" is not an integer");
  if (d < 0 || d > dimension)
    throw InputError(std::string(where) + ": degree " + k +
                     " outside [0, " + std::to_string(dimension) + "]");
  return d;
}

} // namespace detail

/// Builds the model described by a space manifest. Schema problems throw
/// InputError; the model is not validated here.
inline ModelPtr parse_space(const json &j) {
  using namespace detail;
  only_keys(j, {"name", "dimension", "groups", "products", "orientation"},
            "space manifest");
  const auto name = string_field(j, "name", "space manifest");
  const auto dim_big = to_integer(field(j, "dimension", "space"), "dimension");
  if (dim_big < 0 || dim_big > 4096)
    throw InputError("space dimension out of range");
  const int dim = static_cast<int>(dim_big);
  ModelBuilder b(name, dim);

  const auto &groups = field(j, "groups", "space manifest");
  if (!groups.is_object())
    throw InputError("\"groups\" must be an object");
  // canonical order: by degree, not by key spelling
  std::map<int, const json *> by_degree;
  for (const auto &[k, g] : groups.items())
    by_degree[degree_key(k, dim, "groups")] = &g;
  for (const auto &[d, g] : by_degree) {
    only_keys(*g, {"free", "torsion"}, "group");
    if (g->contains("free")) {
      const auto &fr = g->at("free");
      if (!fr.is_array())
        throw InputError("\"free\" must be a list of labels");
      for (const auto &l : fr) {
        if (!l.is_string())
          throw InputError("generator labels must be strings");
        b.free(d, l.get<std::string>());
      }
    }
    if (g->contains("torsion")) {
      const auto &tr = g->at("torsion");
      if (!tr.is_array())
        throw InputError("\"torsion\" must be a list");
      for (const auto &t : tr) {
        only_keys(t, {"label", "order"}, "torsion generator");
        b.torsion(d, string_field(t, "label", "torsion generator"),
                  to_integer(field(t, "order", "torsion generator"), "order"));
      }
    }
  }

  if (j.contains("products")) {
    const auto &ps = j.at("products");
    if (!ps.is_array())
      throw InputError("\"products\" must be a list");
    for (const auto &p : ps) {
      only_keys(p, {"left", "right", "result"}, "product");
      const auto &res = field(p, "result", "product");
      if (!res.is_object())
        throw InputError("product \"result\" must be an object");
      ModelBuilder::Terms terms;
      for (const auto &[label, coef] : res.items())
        terms.emplace_back(label, to_integer(coef, "product coefficient"));
      b.product(string_field(p, "left", "product"),
                string_field(p, "right", "product"), std::move(terms));
    }
  }
  if (j.contains("orientation")) {
    const auto &o = j.at("orientation");
    only_keys(o, {"class", "value"}, "orientation");
    b.orientation(string_field(o, "class", "orientation"),
                  to_integer(field(o, "value", "orientation"), "value"));
  }
  return b.build();
}

/// Canonical manifest of a model; parse_space(to_json(m)) reproduces m.
inline json to_json(const CohomologyModel &m) {
  json j;
  j["name"] = m.name();
  j["dimension"] = m.dimension();
  json groups = json::object();
  for (int d = 0; d <= m.dimension(); ++d) {
    const auto &b = m.basis(d);
    if (b.size() == 0)
      continue;
    json g = json::object();
    g["free"] = b.free;
    if (!b.torsion.empty()) {
      json ts = json::array();
      for (const auto &t : b.torsion)
        ts.push_back({{"label", t.label}, {"order", from_integer(t.order)}});
      g["torsion"] = ts;
    }
    groups[std::to_string(d)] = g;
  }
  j["groups"] = groups;

  json products = json::array();
  for (const auto &[key, v] : m.product_table()) {
    const auto &[a, c] = key;
    const bool unit_entry = (a.degree == 0 && a.index == 0) ||
                            (c.degree == 0 && c.index == 0);
    if (unit_entry) {
      const auto &other = a.degree == 0 && a.index == 0 ? c : a;
      IntVector e(m.rank(other.degree), Integer(0));
      e[other.index] = 1;
      if (v == e)
        continue; // regenerated on parse
    }
    json res = json::object();
    const int d = a.degree + c.degree;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0)
        res[m.basis(d).label(i)] = from_integer(v[i]);
    products.push_back(
        {{"left", m.label(a)}, {"right", m.label(c)}, {"result", res}});
  }
  j["products"] = products;

  const auto &o = m.orientation();
  for (std::size_t i = 0; i < o.size(); ++i)
    if (o[i] != 0) {
      j["orientation"] = {{"class", m.basis(m.dimension()).free[i]},
                          {"value", from_integer(o[i])}};
      break;
    }
  return j;
}

using SpaceResolver = std::function<ModelPtr(const std::string &name)>;

/// Builds the ring map of a map manifest, looking spaces up by name. The
/// map is not validated here.
inline RingMap parse_map(const json &j, const SpaceResolver &resolve) {
  using namespace detail;
  only_keys(j, {"name", "source", "target", "matrices"}, "map manifest");
  const auto name = string_field(j, "name", "map manifest");
  const auto source = resolve(string_field(j, "source", "map manifest"));
  const auto target = resolve(string_field(j, "target", "map manifest"));
  const auto &mats = field(j, "matrices", "map manifest");
  if (!mats.is_object())
    throw InputError("\"matrices\" must be an object");
  std::vector<IntMatrix> matrices(
      static_cast<std::size_t>(source->dimension()) + 1);
  for (int d = 0; d <= source->dimension(); ++d)
    matrices[static_cast<std::size_t>(d)] =
        IntMatrix(target->rank(d), source->rank(d));
  for (const auto &[k, rows] : mats.items()) {
    const int d = degree_key(k, source->dimension(), "matrices");
    if (!rows.is_array())
      throw InputError("matrix for degree " + k + " must be a list of rows");
    std::vector<IntVector> rv;
    for (const auto &row : rows) {
      if (!row.is_array())
        throw InputError("matrix rows must be lists");
      IntVector r;
      for (const auto &x : row)
        r.push_back(to_integer(x, "matrix entry"));
      rv.push_back(std::move(r));
    }
    matrices[static_cast<std::size_t>(d)] =
        IntMatrix::from_rows(rv, source->rank(d));
  }
  return {name, source, target, std::move(matrices)};
}

inline json to_json(const RingMap &f) {
  json mats = json::object();
  for (int d = 0; d <= f.source()->dimension(); ++d) {
    const auto &M = f.matrix(d);
    if (M.rows() == 0 || M.cols() == 0)
      continue;
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
      json r = json::array();
      for (std::size_t c = 0; c < M.cols(); ++c)
        r.push_back(from_integer(M(i, c)));
      rows.push_back(r);
    }
    mats[std::to_string(d)] = rows;
  }
  return {{"name", f.name()},
          {"source", f.source()->name()},
          {"target", f.target()->name()},
          {"matrices", mats}};
}

inline json to_json(const AbelianGroup &g) {
  json t = json::array();
  for (const auto &x : g.torsion)
    t.push_back(from_integer(x));
  return {{"free_rank", g.free_rank}, {"torsion", t}};
}

/// Coefficient map keyed by basis labels; zero coefficients omitted.
template <typename Class> json class_to_json(const Class &c) {
  json out = json::object();
  const auto &b = c.model()->basis(c.degree());
  for (std::size_t i = 0; i < c.coeffs().size(); ++i)
    if (c.coeffs()[i] != 0)
      out[b.label(i)] = from_integer(c.coeffs()[i]);
  return out;
}

inline json to_json(const IntMatrix &M) {
  json rows = json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (std::size_t c = 0; c < M.cols(); ++c)
      r.push_back(from_integer(M(i, c)));
    rows.push_back(r);
  }
  return rows;
}

} // namespace ctrace::manifest
