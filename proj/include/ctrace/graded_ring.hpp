#pragma once

// Closed oriented manifolds as finite graded-commutative cohomology rings,
// and maps between them as induced graded ring homomorphisms.
//
// Conventions:
//  * a basis in each degree lists the free generators first, then the
//    torsion generators; torsion coordinates are kept in [0, order)
//  * a map of spaces f: M -> N is stored as f^*: H^*(N) -> H^*(M), so a
//    RingMap's source model is the cohomology of the map's target space
//  * homology is represented only for torsion-free models, by dual
//    coordinates: a homology class z of degree d is the vector <b_i, z>
//  * cap product is defined by <c ∪ d, z> = <c, d ∩ z>, hence the Poincaré
//    dual of c has coordinates <b'_j ∪ c, [M]>

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ctrace/error.hpp"
#include "ctrace/exact_linalg.hpp"

namespace ctrace {

struct TorsionGenerator {
  std::string label;
  Integer order;

  friend bool operator==(const TorsionGenerator &,
                         const TorsionGenerator &) = default;
};

/// Generators of a single cohomology group, free part first.
struct DegreeBasis {
  std::vector<std::string> free;
  std::vector<TorsionGenerator> torsion;

  std::size_t size() const { return free.size() + torsion.size(); }
  /// Order of the i-th generator; 0 for free generators.
  Integer order(std::size_t i) const {
    return i < free.size() ? Integer(0) : torsion[i - free.size()].order;
  }
  const std::string &label(std::size_t i) const {
    return i < free.size() ? free[i] : torsion[i - free.size()].label;
  }

  friend bool operator==(const DegreeBasis &, const DegreeBasis &) = default;
};

/// A basis element addressed by degree and position within that degree.
struct BasisRef {
  int degree = 0;
  std::size_t index = 0;

  friend auto operator<=>(const BasisRef &, const BasisRef &) = default;
};

inline int koszul_sign(int p, int q) { return (p * q) % 2 == 0 ? 1 : -1; }

class ModelBuilder;

/// Finite graded-commutative ring with an orientation functional.
class CohomologyModel {
public:
  const std::string &name() const { return name_; }
  int dimension() const { return dimension_; }
  bool oriented_closed() const { return oriented_closed_; }
  bool torsion_free() const {
    for (const auto &b : degrees_)
      if (!b.torsion.empty())
        return false;
    return true;
  }

  const DegreeBasis &basis(int d) const {
    static const DegreeBasis empty;
    if (d < 0 || d > dimension_)
      return empty;
    return degrees_[static_cast<std::size_t>(d)];
  }
  std::size_t rank(int d) const { return basis(d).size(); }
  std::size_t free_rank(int d) const { return basis(d).free.size(); }

  /// Orientation functional on the free part of the top degree; empty if
  /// no orientation was declared.
  const IntVector &orientation() const { return orientation_; }

  std::optional<BasisRef> find(std::string_view label) const {
    for (int d = 0; d <= dimension_; ++d) {
      const auto &b = basis(d);
      for (std::size_t i = 0; i < b.size(); ++i)
        if (b.label(i) == label)
          return BasisRef{d, i};
    }
    return std::nullopt;
  }
  const std::string &label(BasisRef r) const {
    return basis(r.degree).label(r.index);
  }

  /// Reduces torsion coordinates of a degree-d vector into [0, order).
  IntVector reduce(int d, IntVector v) const {
    const auto &b = basis(d);
    for (std::size_t i = b.free.size(); i < v.size() && i < b.size(); ++i)
      v[i] = reduce_mod(v[i], b.order(i));
    return v;
  }

  /// Cup product of two basis elements, as a vector in degree p+q (empty
  /// when p+q exceeds the dimension).
  IntVector multiply(BasisRef a, BasisRef b) const {
    const int d = a.degree + b.degree;
    if (d > dimension_)
      return {};
    auto it = products_.find({a, b});
    if (it == products_.end())
      return IntVector(rank(d), Integer(0));
    return it->second;
  }

  const std::map<std::pair<BasisRef, BasisRef>, IntVector> &
  product_table() const {
    return products_;
  }

  friend bool operator==(const CohomologyModel &,
                         const CohomologyModel &) = default;

private:
  friend class ModelBuilder;

  std::string name_;
  int dimension_ = 0;
  bool oriented_closed_ = true;
  std::vector<DegreeBasis> degrees_;
  std::map<std::pair<BasisRef, BasisRef>, IntVector> products_;
  IntVector orientation_;
};

using ModelPtr = std::shared_ptr<const CohomologyModel>;

inline bool same_model(const ModelPtr &a, const ModelPtr &b) {
  return a == b || (a && b && *a == *b);
}

/// Assembles a CohomologyModel from labelled generators and product entries.
///
/// Products not listed are zero. Products with the degree-0 unit are filled
/// in automatically unless given explicitly. Structural mistakes (unknown
/// label, degree out of range, result in the wrong degree) throw InputError;
/// algebraic invariants are checked separately by validate_model.
class ModelBuilder {
public:
  using Terms = std::vector<std::pair<std::string, Integer>>;

  ModelBuilder(std::string name, int dimension)
      : name_(std::move(name)), dimension_(dimension) {
    if (dimension < 0)
      throw InputError("negative dimension");
    degrees_.resize(static_cast<std::size_t>(dimension) + 1);
  }

  ModelBuilder &free(int degree, std::string label) {
    check_degree(degree, label);
    check_fresh(label);
    degrees_[static_cast<std::size_t>(degree)].free.push_back(
        std::move(label));
    return *this;
  }
  ModelBuilder &torsion(int degree, std::string label, Integer order) {
    check_degree(degree, label);
    check_fresh(label);
    degrees_[static_cast<std::size_t>(degree)].torsion.push_back(
        {std::move(label), std::move(order)});
    return *this;
  }
  ModelBuilder &product(std::string left, std::string right, Terms result) {
    products_.push_back({std::move(left), std::move(right), std::move(result)});
    return *this;
  }
  ModelBuilder &orientation(std::string label, Integer value) {
    orientation_ = {std::move(label), std::move(value)};
    return *this;
  }
  ModelBuilder &oriented_closed(bool v) {
    oriented_closed_ = v;
    return *this;
  }

  ModelPtr build() const {
    auto m = std::make_shared<CohomologyModel>();
    m->name_ = name_;
    m->dimension_ = dimension_;
    m->oriented_closed_ = oriented_closed_;
    m->degrees_ = degrees_;
    for (const auto &b : m->degrees_)
      for (const auto &t : b.torsion)
        if (t.order < 2)
          throw InputError("torsion generator '" + t.label +
                           "' must have order >= 2");

    for (const auto &[l, r, terms] : products_) {
      auto a = lookup(*m, l), b = lookup(*m, r);
      const int d = a.degree + b.degree;
      IntVector v(m->rank(d), Integer(0));
      for (const auto &[label, coef] : terms) {
        auto t = lookup(*m, label);
        if (t.degree != d)
          throw InputError("product " + l + "*" + r + " has term '" + label +
                           "' in degree " + std::to_string(t.degree) +
                           ", expected " + std::to_string(d));
        v[t.index] += coef;
      }
      if (d > dimension_) {
        if (!terms.empty())
          throw InputError("product " + l + "*" + r +
                           " exceeds the dimension");
        continue;
      }
      if (m->products_.count({a, b}))
        throw InputError("product " + l + "*" + r + " listed twice");
      m->products_[{a, b}] = m->reduce(d, std::move(v));
    }

    // unit products
    if (!m->degrees_.empty() && !m->degrees_[0].free.empty()) {
      const BasisRef unit{0, 0};
      for (int d = 0; d <= dimension_; ++d)
        for (std::size_t i = 0; i < m->rank(d); ++i) {
          IntVector e(m->rank(d), Integer(0));
          e[i] = 1;
          m->products_.try_emplace({unit, BasisRef{d, i}}, e);
          m->products_.try_emplace({BasisRef{d, i}, unit}, e);
        }
    }
    // Drop explicit zero entries so equal rings compare equal.
    for (auto it = m->products_.begin(); it != m->products_.end();) {
      bool zero = true;
      for (const auto &x : it->second)
        zero = zero && x == 0;
      it = zero ? m->products_.erase(it) : std::next(it);
    }

    if (orientation_) {
      auto t = lookup(*m, orientation_->first);
      if (t.degree != dimension_ || t.index >= m->free_rank(dimension_))
        throw InputError("orientation class '" + orientation_->first +
                         "' is not a free top-degree generator");
      m->orientation_.assign(m->free_rank(dimension_), Integer(0));
      m->orientation_[t.index] = orientation_->second;
    }
    return m;
  }

private:
  struct ProductEntry {
    std::string left, right;
    Terms result;
  };

  void check_degree(int degree, const std::string &label) const {
    if (degree < 0 || degree > dimension_)
      throw InputError("generator '" + label + "' has degree " +
                       std::to_string(degree) + " outside [0, " +
                       std::to_string(dimension_) + "]");
  }
  void check_fresh(const std::string &label) {
    if (!labels_.insert(label).second)
      throw InputError("duplicate generator label '" + label + "'");
  }
  static BasisRef lookup(const CohomologyModel &m, const std::string &label) {
    auto r = m.find(label);
    if (!r)
      throw InputError("unknown generator label '" + label + "'");
    return *r;
  }

  std::string name_;
  int dimension_;
  bool oriented_closed_ = true;
  std::vector<DegreeBasis> degrees_;
  std::set<std::string> labels_;
  std::vector<ProductEntry> products_;
  std::optional<std::pair<std::string, Integer>> orientation_;
};

/// Element of H^d of a model, in coordinates over the degree-d basis.
class CohomologyClass {
public:
  CohomologyClass(ModelPtr model, int degree, IntVector coeffs)
      : model_(std::move(model)), degree_(degree) {
    if (coeffs.size() != model_->rank(degree))
      throw InputError("class in degree " + std::to_string(degree) +
                       " needs " + std::to_string(model_->rank(degree)) +
                       " coordinates, got " + std::to_string(coeffs.size()));
    coeffs_ = model_->reduce(degree, std::move(coeffs));
  }

  static CohomologyClass zero(ModelPtr model, int degree) {
    const auto n = model->rank(degree);
    return {std::move(model), degree, IntVector(n, Integer(0))};
  }
  static CohomologyClass generator(ModelPtr model, std::string_view label) {
    auto r = model->find(label);
    if (!r)
      throw InputError("unknown generator label '" + std::string(label) + "'");
    IntVector v(model->rank(r->degree), Integer(0));
    v[r->index] = 1;
    return {std::move(model), r->degree, std::move(v)};
  }
  static CohomologyClass unit(ModelPtr model) {
    if (model->rank(0) == 0)
      throw InputError("model has no unit");
    IntVector v(model->rank(0), Integer(0));
    v[0] = 1;
    return {std::move(model), 0, std::move(v)};
  }

  const ModelPtr &model() const { return model_; }
  int degree() const { return degree_; }
  const IntVector &coeffs() const { return coeffs_; }
  const Integer &operator[](std::size_t i) const { return coeffs_[i]; }
  bool is_zero() const {
    for (const auto &c : coeffs_)
      if (c != 0)
        return false;
    return true;
  }

  CohomologyClass &operator+=(const CohomologyClass &o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      coeffs_[i] += o.coeffs_[i];
    coeffs_ = model_->reduce(degree_, std::move(coeffs_));
    return *this;
  }
  friend CohomologyClass operator+(CohomologyClass a,
                                   const CohomologyClass &b) {
    return a += b;
  }
  friend CohomologyClass operator*(const Integer &s, CohomologyClass c) {
    for (auto &x : c.coeffs_)
      x *= s;
    c.coeffs_ = c.model_->reduce(c.degree_, std::move(c.coeffs_));
    return c;
  }
  friend CohomologyClass operator-(CohomologyClass a,
                                   const CohomologyClass &b) {
    return a += Integer(-1) * b;
  }
  friend bool operator==(const CohomologyClass &a, const CohomologyClass &b) {
    return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_ &&
           same_model(a.model_, b.model_);
  }

  /// Human-readable linear combination, e.g. "2*x^2" or "0".
  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] == 0)
        continue;
      if (!first)
        os << " + ";
      if (coeffs_[i] != 1)
        os << coeffs_[i] << '*';
      os << model_->basis(degree_).label(i);
      first = false;
    }
    return first ? "0" : os.str();
  }

private:
  void check_compatible(const CohomologyClass &o) const {
    if (degree_ != o.degree_ || !same_model(model_, o.model_))
      throw InputError("classes live in different groups");
  }

  ModelPtr model_;
  int degree_;
  IntVector coeffs_;
};

/// Element of H_d of a torsion-free model, in dual coordinates <b_i, z>.
class HomologyClass {
public:
  HomologyClass(ModelPtr model, int degree, IntVector coeffs)
      : model_(std::move(model)), degree_(degree), coeffs_(std::move(coeffs)) {
    if (!model_->torsion_free())
      throw ComputeError("homology classes need a torsion-free model ('" +
                         model_->name() + "' has torsion)");
    if (coeffs_.size() != model_->rank(degree))
      throw InputError("homology class coordinate count mismatch");
  }

  const ModelPtr &model() const { return model_; }
  int degree() const { return degree_; }
  const IntVector &coeffs() const { return coeffs_; }
  const Integer &operator[](std::size_t i) const { return coeffs_[i]; }
  bool is_zero() const {
    for (const auto &c : coeffs_)
      if (c != 0)
        return false;
    return true;
  }

  friend HomologyClass operator*(const Integer &s, HomologyClass z) {
    for (auto &x : z.coeffs_)
      x *= s;
    return z;
  }
  friend bool operator==(const HomologyClass &a, const HomologyClass &b) {
    return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_ &&
           same_model(a.model_, b.model_);
  }

private:
  ModelPtr model_;
  int degree_;
  IntVector coeffs_;
};

/// Kronecker pairing <c, z> of a cohomology and a homology class.
inline Integer kronecker(const CohomologyClass &c, const HomologyClass &z) {
  if (c.degree() != z.degree() || !same_model(c.model(), z.model()))
    throw InputError("pairing of classes from different groups");
  Integer s = 0;
  for (std::size_t i = 0; i < c.coeffs().size(); ++i)
    s += c[i] * z[i];
  return s;
}

inline CohomologyClass cup(const CohomologyClass &a, const CohomologyClass &b) {
  if (!same_model(a.model(), b.model()))
    throw InputError("cup product of classes from different models");
  const auto &m = *a.model();
  const int d = a.degree() + b.degree();
  if (d > m.dimension())
    return CohomologyClass(a.model(), d, {});
  IntVector out(m.rank(d), Integer(0));
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    if (a[i] == 0)
      continue;
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
      if (b[j] == 0)
        continue;
      const auto p = m.multiply({a.degree(), i}, {b.degree(), j});
      for (std::size_t k = 0; k < p.size(); ++k)
        out[k] += a[i] * b[j] * p[k];
    }
  }
  return {a.model(), d, std::move(out)};
}

/// <c, [M]> for a top-degree class; torsion coordinates contribute nothing.
inline Integer evaluate(const CohomologyClass &c) {
  const auto &m = *c.model();
  if (c.degree() != m.dimension())
    throw InputError("evaluation needs a class of degree " +
                     std::to_string(m.dimension()));
  if (!m.oriented_closed() || m.orientation().empty())
    throw ComputeError("model '" + m.name() + "' carries no orientation");
  Integer s = 0;
  for (std::size_t i = 0; i < m.orientation().size(); ++i)
    s += m.orientation()[i] * c[i];
  return s;
}

/// P(i, j) = <b_i ∪ b'_j, [M]> for degree-p basis b and degree-q basis b'.
inline IntMatrix pairing_matrix(const CohomologyModel &m, int p, int q) {
  IntMatrix P(m.rank(p), m.rank(q));
  if (p + q != m.dimension())
    throw InputError("pairing degrees must add up to the dimension");
  for (std::size_t i = 0; i < m.rank(p); ++i)
    for (std::size_t j = 0; j < m.rank(q); ++j) {
      auto v = m.multiply({p, i}, {q, j});
      Integer s = 0;
      for (std::size_t k = 0; k < m.orientation().size() && k < v.size(); ++k)
        s += m.orientation()[k] * v[k];
      P(i, j) = s;
    }
  return P;
}

/// Every violated invariant, one message per violation; never throws.
inline std::vector<std::string> validate_model(const CohomologyModel &m) {
  std::vector<std::string> bad;
  const int dim = m.dimension();
  auto lab = [&](BasisRef r) { return m.label(r); };

  std::vector<BasisRef> all;
  for (int d = 0; d <= dim; ++d)
    for (std::size_t i = 0; i < m.rank(d); ++i)
      all.push_back({d, i});

  if (m.free_rank(0) != 1 || !m.basis(0).torsion.empty()) {
    bad.push_back("degree-0 group must be Z with a single unit generator");
  } else {
    for (const auto &c : all) {
      IntVector e(m.rank(c.degree), Integer(0));
      e[c.index] = 1;
      if (m.multiply({0, 0}, c) != e || m.multiply(c, {0, 0}) != e)
        bad.push_back("unit law fails for '" + lab(c) + "'");
    }
  }
  for (int d = 0; d <= dim; ++d)
    for (const auto &t : m.basis(d).torsion)
      if (t.order < 2)
        bad.push_back("torsion generator '" + t.label + "' has order < 2");

  for (const auto &a : all)
    for (const auto &b : all) {
      const int d = a.degree + b.degree;
      if (d > dim || a > b)
        continue;
      auto ab = m.multiply(a, b);
      auto ba = m.multiply(b, a);
      const int s = koszul_sign(a.degree, b.degree);
      IntVector sba(ba.size());
      for (std::size_t k = 0; k < ba.size(); ++k)
        sba[k] = s * ba[k];
      if (m.reduce(d, ab) != m.reduce(d, sba))
        bad.push_back("graded commutativity fails for '" + lab(a) + "','" +
                      lab(b) + "'");
    }

  for (const auto &a : all)
    for (const auto &b : all)
      for (const auto &c : all) {
        const int d = a.degree + b.degree + c.degree;
        if (d > dim)
          continue;
        IntVector left(m.rank(d), Integer(0)), right(m.rank(d), Integer(0));
        const auto ab = m.multiply(a, b);
        for (std::size_t k = 0; k < ab.size(); ++k) {
          if (ab[k] == 0)
            continue;
          auto v = m.multiply({a.degree + b.degree, k}, c);
          for (std::size_t t = 0; t < v.size(); ++t)
            left[t] += ab[k] * v[t];
        }
        const auto bc = m.multiply(b, c);
        for (std::size_t k = 0; k < bc.size(); ++k) {
          if (bc[k] == 0)
            continue;
          auto v = m.multiply(a, {b.degree + c.degree, k});
          for (std::size_t t = 0; t < v.size(); ++t)
            right[t] += bc[k] * v[t];
        }
        if (m.reduce(d, left) != m.reduce(d, right))
          bad.push_back("associativity fails for '" + lab(a) + "','" +
                        lab(b) + "','" + lab(c) + "'");
      }

  for (const auto &a : all)
    for (const auto &b : all) {
      const int d = a.degree + b.degree;
      if (d > dim)
        continue;
      Integer order = 0;
      for (const auto &r : {a, b}) {
        const Integer o = m.basis(r.degree).order(r.index);
        if (o != 0)
          order = order == 0 ? o : gcd(order, o);
      }
      if (order == 0)
        continue;
      auto v = m.multiply(a, b);
      for (auto &x : v)
        x *= order;
      bool killed = true;
      for (auto &x : m.reduce(d, v))
        killed = killed && x == 0;
      if (!killed)
        bad.push_back("product '" + lab(a) + "','" + lab(b) +
                      "' is not killed by the torsion order");
    }

  if (m.oriented_closed()) {
    bool nonzero = false;
    for (const auto &x : m.orientation())
      nonzero = nonzero || x != 0;
    if (!nonzero) {
      bad.push_back("missing orientation on a closed oriented model");
    } else if (m.torsion_free()) {
      for (int d = 0; d <= dim; ++d) {
        const auto P = pairing_matrix(m, d, dim - d);
        bool unimodular = P.square();
        if (unimodular) {
          const auto det = determinant(P);
          unimodular = det == 1 || det == -1;
        }
        if (!unimodular)
          bad.push_back("Poincaré pairing in degree " + std::to_string(d) +
                        " is not unimodular");
      }
    }
  }
  return bad;
}

inline void require_valid(const CohomologyModel &m) {
  auto bad = validate_model(m);
  if (!bad.empty())
    throw ValidationError("model '" + m.name() + "': " + bad.front(), bad);
}

/// Induced graded ring homomorphism f^*: H^*(source) -> H^*(target).
class RingMap {
public:
  /// matrices[d] has shape rank_target(d) x rank_source(d); degrees beyond
  /// the vector default to zero.
  RingMap(std::string name, ModelPtr source, ModelPtr target,
          std::vector<IntMatrix> matrices)
      : name_(std::move(name)), source_(std::move(source)),
        target_(std::move(target)) {
    const int top = source_->dimension();
    matrices_.reserve(static_cast<std::size_t>(top) + 1);
    for (int d = 0; d <= top; ++d) {
      const auto r = target_->rank(d), c = source_->rank(d);
      if (static_cast<std::size_t>(d) < matrices.size()) {
        auto &M = matrices[static_cast<std::size_t>(d)];
        if (M.rows() != r || M.cols() != c)
          throw InputError("map '" + name_ + "' degree " + std::to_string(d) +
                           " matrix must be " + std::to_string(r) + "x" +
                           std::to_string(c));
        matrices_.push_back(reduce_columns(d, std::move(M)));
      } else {
        matrices_.push_back(IntMatrix(r, c));
      }
    }
    for (std::size_t d = static_cast<std::size_t>(top) + 1;
         d < matrices.size(); ++d)
      if (!matrices[d].is_zero())
        throw InputError("map '" + name_ +
                         "' has a nonzero matrix above the source dimension");
  }

  static RingMap identity(const ModelPtr &m) {
    std::vector<IntMatrix> mats;
    for (int d = 0; d <= m->dimension(); ++d)
      mats.push_back(IntMatrix::identity(m->rank(d)));
    return {"id_" + m->name(), m, m, std::move(mats)};
  }

  const std::string &name() const { return name_; }
  const ModelPtr &source() const { return source_; }
  const ModelPtr &target() const { return target_; }
  const IntMatrix &matrix(int d) const {
    static const IntMatrix empty;
    if (d < 0 || d > source_->dimension())
      return empty;
    return matrices_[static_cast<std::size_t>(d)];
  }
  const std::vector<IntMatrix> &matrices() const { return matrices_; }

  IntVector apply(int d, const IntVector &v) const {
    if (d > source_->dimension() || d > target_->dimension())
      return IntVector(target_->rank(d), Integer(0));
    return target_->reduce(d, matrix(d) * v);
  }

  friend bool operator==(const RingMap &a, const RingMap &b) {
    return same_model(a.source_, b.source_) &&
           same_model(a.target_, b.target_) && a.matrices_ == b.matrices_;
  }

private:
  IntMatrix reduce_columns(int d, IntMatrix M) const {
    const auto &b = target_->basis(d);
    for (std::size_t i = b.free.size(); i < M.rows(); ++i)
      for (std::size_t j = 0; j < M.cols(); ++j)
        M(i, j) = reduce_mod(M(i, j), b.order(i));
    return M;
  }

  std::string name_;
  ModelPtr source_;
  ModelPtr target_;
  std::vector<IntMatrix> matrices_;
};

inline std::vector<std::string> validate_map(const RingMap &f) {
  std::vector<std::string> bad;
  const auto &S = *f.source();
  const auto &T = *f.target();
  if (S.rank(0) == 0 || T.rank(0) == 0) {
    bad.push_back("models need a unit");
    return bad;
  }
  IntVector one(S.rank(0), Integer(0));
  one[0] = 1;
  IntVector unit_image(T.rank(0), Integer(0));
  unit_image[0] = 1;
  if (f.apply(0, one) != unit_image)
    bad.push_back("unit is not mapped to the unit");

  for (int d = 0; d <= S.dimension(); ++d)
    for (std::size_t j = 0; j < S.rank(d); ++j) {
      const Integer o = S.basis(d).order(j);
      if (o == 0)
        continue;
      IntVector col = f.matrix(d).column(j);
      for (auto &x : col)
        x *= o;
      for (const auto &x : T.reduce(d, col))
        if (x != 0) {
          bad.push_back("image of torsion generator '" + S.basis(d).label(j) +
                        "' is not killed by its order");
          break;
        }
    }

  for (int p = 0; p <= S.dimension(); ++p)
    for (int q = 0; q <= S.dimension(); ++q) {
      const int d = p + q;
      if (d > T.dimension())
        continue;
      for (std::size_t i = 0; i < S.rank(p); ++i)
        for (std::size_t j = 0; j < S.rank(q); ++j) {
          // f(a b)
          IntVector ab = S.multiply({p, i}, {q, j});
          IntVector lhs = ab.empty() ? IntVector(T.rank(d), Integer(0))
                                     : f.apply(d, ab);
          // f(a) f(b)
          IntVector ea(S.rank(p), Integer(0)), eb(S.rank(q), Integer(0));
          ea[i] = 1;
          eb[j] = 1;
          auto rhs = cup(CohomologyClass(f.target(), p, f.apply(p, ea)),
                         CohomologyClass(f.target(), q, f.apply(q, eb)));
          if (lhs != rhs.coeffs())
            bad.push_back("map is not multiplicative on '" +
                          S.basis(p).label(i) + "','" + S.basis(q).label(j) +
                          "'");
        }
    }
  return bad;
}

inline void require_valid(const RingMap &f) {
  auto bad = validate_map(f);
  if (!bad.empty())
    throw ValidationError("map '" + f.name() + "': " + bad.front(), bad);
}

/// outer ∘ inner as ring maps: inner is applied first.
inline RingMap compose(const RingMap &outer, const RingMap &inner) {
  if (!same_model(inner.target(), outer.source()))
    throw InputError("cannot compose '" + outer.name() + "' after '" +
                     inner.name() + "'");
  std::vector<IntMatrix> mats;
  for (int d = 0; d <= inner.source()->dimension(); ++d) {
    if (d > outer.source()->dimension())
      mats.push_back(
          IntMatrix(outer.target()->rank(d), inner.source()->rank(d)));
    else
      mats.push_back(outer.matrix(d) * inner.matrix(d));
  }
  return {outer.name() + "." + inner.name(), inner.source(), outer.target(),
          std::move(mats)};
}

inline CohomologyClass pullback(const RingMap &f, const CohomologyClass &c) {
  if (!same_model(f.source(), c.model()))
    throw InputError("class does not live in the source of '" + f.name() +
                     "'");
  const int d = c.degree();
  if (d > f.target()->dimension())
    return CohomologyClass(f.target(), d, {});
  return {f.target(), d, f.apply(d, c.coeffs())};
}

/// Euler characteristic from the free ranks.
inline Integer euler_characteristic(const CohomologyModel &m) {
  Integer chi = 0;
  for (int d = 0; d <= m.dimension(); ++d)
    chi += (d % 2 == 0 ? 1 : -1) * static_cast<long long>(m.free_rank(d));
  return chi;
}

inline void require_poincare(const CohomologyModel &m, std::string_view what) {
  if (!m.torsion_free())
    throw ComputeError(std::string(what) + " needs a torsion-free model; '" +
                       m.name() + "' has torsion");
  if (!m.oriented_closed() || m.orientation().empty())
    throw ComputeError(std::string(what) + " needs an oriented model; '" +
                       m.name() + "' has no orientation");
}

/// Classes b^i of degree m-d with <b^i ∪ b_j, [M]> = delta_ij, where b_j
/// runs over the degree-d basis.
struct DualBasis {
  int degree = 0;
  std::vector<CohomologyClass> duals;
};

inline DualBasis dual_basis(const ModelPtr &model, int d) {
  require_poincare(*model, "dual basis");
  const int m = model->dimension();
  if (d < 0 || d > m)
    throw InputError("dual basis degree out of range");
  // Q(k, j) = <b'_k ∪ b_j>; writing b^i = sum_k C(i,k) b'_k gives C Q = 1.
  const auto Q = pairing_matrix(*model, m - d, d);
  IntMatrix C;
  try {
    C = unimodular_inverse(Q);
  } catch (const ComputeError &) {
    throw ComputeError("Poincaré pairing of '" + model->name() +
                       "' in degree " + std::to_string(d) +
                       " is not unimodular");
  }
  DualBasis out{d, {}};
  for (std::size_t i = 0; i < model->rank(d); ++i)
    out.duals.emplace_back(model, m - d, C.row(i));
  return out;
}

/// Homology class c ∩ [M] of degree m - |c|.
inline HomologyClass poincare_dual(const CohomologyClass &c) {
  const auto &model = c.model();
  require_poincare(*model, "Poincaré duality");
  const int m = model->dimension();
  const int q = m - c.degree();
  if (q < 0)
    throw InputError("class degree exceeds the dimension");
  IntVector z(model->rank(q));
  for (std::size_t j = 0; j < model->rank(q); ++j) {
    IntVector e(model->rank(q), Integer(0));
    e[j] = 1;
    z[j] = evaluate(cup(CohomologyClass(model, q, std::move(e)), c));
  }
  return {model, q, std::move(z)};
}

/// f_* z, characterised by <c, f_* z> = <f^* c, z>.
inline HomologyClass homology_pushforward(const RingMap &f,
                                          const HomologyClass &z) {
  if (!same_model(f.target(), z.model()))
    throw InputError("homology class does not live in the domain of '" +
                     f.name() + "'");
  if (!f.source()->torsion_free())
    throw ComputeError("pushforward needs a torsion-free target space");
  const int d = z.degree();
  if (d > f.source()->dimension())
    return {f.source(), d, IntVector(f.source()->rank(d), Integer(0))};
  return {f.source(), d, f.matrix(d).transpose() * z.coeffs()};
}

/// Basis of degree d of A ⊗ B: (degree of a, index of a, index of b),
/// ordered by the degree of the left factor, then lexicographically.
inline std::vector<std::tuple<int, std::size_t, std::size_t>>
tensor_layout(const CohomologyModel &A, const CohomologyModel &B, int d) {
  std::vector<std::tuple<int, std::size_t, std::size_t>> out;
  for (int p = 0; p <= std::min(d, A.dimension()); ++p) {
    const int q = d - p;
    if (q > B.dimension())
      continue;
    for (std::size_t i = 0; i < A.rank(p); ++i)
      for (std::size_t j = 0; j < B.rank(q); ++j)
        out.emplace_back(p, i, j);
  }
  return out;
}

inline std::string tensor_label(const std::string &a, const std::string &b) {
  return a + "|" + b;
}

/// Künneth model of A × B with the Koszul sign
/// (a1,b1)(a2,b2) = (-1)^{|b1||a2|} (a1 a2, b1 b2).
inline ModelPtr tensor_model(const ModelPtr &A, const ModelPtr &B) {
  if (!A->torsion_free() || !B->torsion_free())
    throw ComputeError("tensor model needs torsion-free factors");
  const int dim = A->dimension() + B->dimension();
  ModelBuilder builder(A->name() + "x" + B->name(), dim);
  std::vector<std::vector<std::tuple<int, std::size_t, std::size_t>>> layout;
  for (int d = 0; d <= dim; ++d) {
    layout.push_back(tensor_layout(*A, *B, d));
    for (auto [p, i, j] : layout.back())
      builder.free(d, tensor_label(A->basis(p).label(i),
                                   B->basis(d - p).label(j)));
  }
  auto lbl = [&](int p, std::size_t i, int q, std::size_t j) {
    return tensor_label(A->basis(p).label(i), B->basis(q).label(j));
  };
  for (int d1 = 0; d1 <= dim; ++d1)
    for (auto [p1, i1, j1] : layout[static_cast<std::size_t>(d1)])
      for (int d2 = 0; d1 + d2 <= dim; ++d2)
        for (auto [p2, i2, j2] : layout[static_cast<std::size_t>(d2)]) {
          const int q1 = d1 - p1, q2 = d2 - p2;
          const auto aa = A->multiply({p1, i1}, {p2, i2});
          const auto bb = B->multiply({q1, j1}, {q2, j2});
          if (aa.empty() || bb.empty())
            continue;
          const int sign = koszul_sign(q1, p2);
          ModelBuilder::Terms terms;
          for (std::size_t x = 0; x < aa.size(); ++x)
            for (std::size_t y = 0; y < bb.size(); ++y)
              if (aa[x] != 0 && bb[y] != 0)
                terms.emplace_back(lbl(p1 + p2, x, q1 + q2, y),
                                   sign * aa[x] * bb[y]);
          if (!terms.empty())
            builder.product(lbl(p1, i1, q1, j1), lbl(p2, i2, q2, j2),
                            std::move(terms));
        }
  builder.oriented_closed(A->oriented_closed() && B->oriented_closed());
  const auto &oa = A->orientation();
  const auto &ob = B->orientation();
  if (oa.size() == 1 && ob.size() == 1)
    builder.orientation(lbl(A->dimension(), 0, B->dimension(), 0),
                        oa[0] * ob[0]);
  return builder.build();
}

/// f ⊗ f' between the tensor models of sources and targets.
inline RingMap tensor_map(const RingMap &f, const RingMap &g) {
  auto src = tensor_model(f.source(), g.source());
  auto tgt = tensor_model(f.target(), g.target());
  std::vector<IntMatrix> mats;
  for (int d = 0; d <= src->dimension(); ++d) {
    const auto cols = tensor_layout(*f.source(), *g.source(), d);
    const auto rows = tensor_layout(*f.target(), *g.target(), d);
    IntMatrix M(rows.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto [p, i, j] = cols[c];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto [pr, x, y] = rows[r];
        if (pr != p)
          continue;
        M(r, c) = f.matrix(p)(x, i) * g.matrix(d - p)(y, j);
      }
    }
    mats.push_back(std::move(M));
  }
  return {f.name() + "x" + g.name(), src, tgt, std::move(mats)};
}

/// Cross product of cohomology classes in the tensor model.
inline CohomologyClass cross(const CohomologyClass &a, const CohomologyClass &b,
                             const ModelPtr &product) {
  const int d = a.degree() + b.degree();
  const auto layout = tensor_layout(*a.model(), *b.model(), d);
  IntVector v(layout.size(), Integer(0));
  for (std::size_t k = 0; k < layout.size(); ++k) {
    auto [p, i, j] = layout[k];
    if (p == a.degree())
      v[k] = a[i] * b[j];
  }
  return {product, d, std::move(v)};
}

/// Cross product of homology classes, dual to the cohomology cross product
/// with <a × b, z × z'> = <a, z><b, z'>.
inline HomologyClass cross(const HomologyClass &z, const HomologyClass &w,
                           const ModelPtr &product) {
  const int d = z.degree() + w.degree();
  const auto layout = tensor_layout(*z.model(), *w.model(), d);
  IntVector v(layout.size(), Integer(0));
  for (std::size_t k = 0; k < layout.size(); ++k) {
    auto [p, i, j] = layout[k];
    if (p == z.degree())
      v[k] = z[i] * w[j];
  }
  return {product, d, std::move(v)};
}

} // namespace ctrace
