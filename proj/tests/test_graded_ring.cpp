#include <gtest/gtest.h>

#include "ctrace/graded_ring.hpp"
#include "ctrace/zoo.hpp"
#include "support.hpp"

using namespace ctrace;

namespace {

CohomologyClass gen(const ModelPtr &m, const char *label) {
  return CohomologyClass::generator(m, label);
}

bool mentions(const std::vector<std::string> &violations, const char *what) {
  for (const auto &v : violations)
    if (v.find(what) != std::string::npos)
      return true;
  return false;
}

// Every map the zoo can produce cheaply, for exhaustive property checks.
std::vector<RingMap> zoo_maps() {
  std::vector<RingMap> out;
  for (int n = 1; n <= 4; ++n)
    for (int d : {-2, 0, 3})
      out.push_back(zoo::sphere_map(zoo::sphere(n), d));
  for (int n = 1; n <= 3; ++n)
    for (int a : {-1, 2})
      out.push_back(zoo::cpn_map(zoo::complex_projective(n), a));
  const auto t2 = zoo::torus(2);
  out.push_back(zoo::torus_map(t2, t2, IntMatrix{{2, 1}, {1, 3}}));
  const auto t3 = zoo::torus(3);
  out.push_back(
      zoo::torus_map(t3, t3, IntMatrix{{1, 2, 0}, {0, -1, 4}, {3, 0, 1}}));
  const auto s2 = zoo::sphere(2);
  out.push_back(zoo::projection(s2, s2, 0));
  out.push_back(zoo::projection(s2, s2, 1));
  return out;
}

} // namespace

TEST(Model, ZooValidates) {
  for (const auto &m : zoo::standard_models())
    EXPECT_TRUE(validate_model(*m).empty())
        << m->name() << ": " << validate_model(*m).front();
}

TEST(Model, BadOrientationOnCp2) {
  const auto m = ModelBuilder("CP2", 4)
                     .free(0, "1")
                     .free(2, "x")
                     .free(4, "x^2")
                     .product("x", "x", {{"x^2", 1}})
                     .orientation("x^2", 2)
                     .build();
  EXPECT_TRUE(mentions(validate_model(*m), "not unimodular"));
  EXPECT_THROW(require_valid(*m), ValidationError);
}

TEST(Model, SymmetricOddProductIsRejected) {
  const auto m = ModelBuilder("bad", 2)
                     .free(0, "1")
                     .free(1, "a")
                     .free(1, "b")
                     .free(2, "w")
                     .product("a", "b", {{"w", 1}})
                     .product("b", "a", {{"w", 1}})
                     .orientation("w", 1)
                     .build();
  EXPECT_TRUE(mentions(validate_model(*m), "commutativ"));
}

TEST(Model, MissingOrientation) {
  const auto m = ModelBuilder("CP2", 4)
                     .free(0, "1")
                     .free(2, "x")
                     .free(4, "x^2")
                     .product("x", "x", {{"x^2", 1}})
                     .build();
  EXPECT_TRUE(mentions(validate_model(*m), "missing orientation"));
}

TEST(Model, NonAssociativeIsRejected) {
  // x * x = y, x * y = 0 but y * x = z in a truncated polynomial-like ring.
  const auto m = ModelBuilder("bad", 6)
                     .free(0, "1")
                     .free(2, "x")
                     .free(4, "y")
                     .free(6, "z")
                     .product("x", "x", {{"y", 1}})
                     .product("x", "y", {{"z", 1}})
                     .product("y", "x", {{"z", 2}})
                     .oriented_closed(false)
                     .build();
  EXPECT_FALSE(validate_model(*m).empty());
}

TEST(Model, TorsionMustKillProducts) {
  const auto m = ModelBuilder("bad", 3)
                     .free(0, "1")
                     .torsion(2, "t", 2)
                     .free(1, "a")
                     .free(3, "v")
                     .product("a", "t", {{"v", 1}})
                     .product("t", "a", {{"v", 1}})
                     .oriented_closed(false)
                     .build();
  EXPECT_TRUE(mentions(validate_model(*m), "torsion"));
}

TEST(Model, BuilderRejectsStructuralMistakes) {
  EXPECT_THROW(ModelBuilder("m", 2).free(3, "u"), InputError);
  EXPECT_THROW(ModelBuilder("m", 2).free(0, "1").free(2, "1"), InputError);
  EXPECT_THROW(
      ModelBuilder("m", 2).free(0, "1").product("1", "q", {}).build(),
      InputError);
  EXPECT_THROW(ModelBuilder("m", 4)
                   .free(0, "1")
                   .free(2, "x")
                   .free(4, "y")
                   .product("x", "x", {{"x", 1}})
                   .build(),
               InputError);
}

TEST(Cup, Examples) {
  const auto cp2 = zoo::complex_projective(2);
  EXPECT_EQ(cup(gen(cp2, "x"), gen(cp2, "x")), gen(cp2, "x^2"));

  const auto t2 = zoo::torus(2);
  const auto a = gen(t2, "e1"), b = gen(t2, "e2");
  EXPECT_EQ(cup(a, b), Integer(-1) * cup(b, a));
  EXPECT_EQ(cup(a, a), CohomologyClass::zero(t2, 2));

  const auto s2 = zoo::sphere(2);
  EXPECT_TRUE(cup(gen(s2, "u"), gen(s2, "u")).is_zero());
  EXPECT_EQ(cup(gen(s2, "u"), gen(s2, "u")).degree(), 4);
}

TEST(Evaluate, Examples) {
  const auto cp2 = zoo::complex_projective(2);
  EXPECT_EQ(evaluate(gen(cp2, "x^2")), 1);
  EXPECT_EQ(evaluate(CohomologyClass::zero(cp2, 4)), 0);
  EXPECT_EQ(evaluate(Integer(3) * gen(cp2, "x^2")), 3);
  EXPECT_THROW(evaluate(gen(cp2, "x")), InputError);
}

TEST(DualBasis, Examples) {
  const auto s2 = zoo::sphere(2);
  EXPECT_EQ(dual_basis(s2, 0).duals.at(0), gen(s2, "u"));
  EXPECT_EQ(dual_basis(s2, 2).duals.at(0), gen(s2, "1"));

  const auto cp2 = zoo::complex_projective(2);
  EXPECT_EQ(dual_basis(cp2, 2).duals.at(0), gen(cp2, "x"));

  // pairing [[0,1],[-1,0]] inverts to [[0,-1],[1,0]]
  const auto t2 = zoo::torus(2);
  const auto d = dual_basis(t2, 1);
  EXPECT_EQ(d.duals.at(0), Integer(-1) * gen(t2, "e2"));
  EXPECT_EQ(d.duals.at(1), gen(t2, "e1"));
}

TEST(DualBasis, KroneckerDeltaOnZoo) {
  for (const auto &m : zoo::standard_models())
    for (int d = 0; d <= m->dimension(); ++d) {
      const auto duals = dual_basis(m, d).duals;
      for (std::size_t i = 0; i < duals.size(); ++i)
        for (std::size_t j = 0; j < m->rank(d); ++j) {
          IntVector v(m->rank(d), Integer(0));
          v[j] = 1;
          const Integer pairing =
              evaluate(cup(duals[i], CohomologyClass(m, d, v)));
          EXPECT_EQ(pairing, i == j ? 1 : 0)
              << m->name() << " degree " << d << " (" << i << "," << j
              << ")";
        }
    }
}

TEST(PoincareDual, Examples) {
  const auto s2 = zoo::sphere(2);
  EXPECT_EQ(poincare_dual(gen(s2, "u")), HomologyClass(s2, 0, {1}));
  EXPECT_EQ(poincare_dual(gen(s2, "1")), HomologyClass(s2, 2, {1}));
  // <e1 ∪ e1, [T]> = 0 and <e2 ∪ e1, [T]> = -1
  const auto t2 = zoo::torus(2);
  EXPECT_EQ(poincare_dual(gen(t2, "e1")), HomologyClass(t2, 1, {0, -1}));
}

TEST(PoincareDual, InvertibleOnZoo) {
  // z_j = <b'_j ∪ c> for the complementary basis b', and c is recovered as
  // sum_j <c ∪ b'_j> times the j-th dual class.
  for (const auto &m : zoo::standard_models())
    for (int d = 0; d <= m->dimension(); ++d) {
      const int q = m->dimension() - d;
      const auto duals = dual_basis(m, q).duals;
      for (std::size_t i = 0; i < m->rank(d); ++i) {
        IntVector v(m->rank(d), Integer(0));
        v[i] = 1;
        const CohomologyClass c(m, d, v);
        const auto z = poincare_dual(c);
        ASSERT_EQ(z.degree(), q);
        CohomologyClass back = CohomologyClass::zero(m, d);
        for (std::size_t j = 0; j < m->rank(q); ++j) {
          IntVector e(m->rank(q), Integer(0));
          e[j] = 1;
          const CohomologyClass bj(m, q, e);
          EXPECT_EQ(z[j], evaluate(cup(bj, c)));
          back += evaluate(cup(c, bj)) * duals[j];
        }
        EXPECT_EQ(back, c) << m->name() << " degree " << d;
      }
    }
}

TEST(Pushforward, Examples) {
  const auto s3 = zoo::sphere(3);
  const HomologyClass fundamental(s3, 3, {1});
  EXPECT_EQ(homology_pushforward(RingMap::identity(s3), fundamental),
            fundamental);
  EXPECT_EQ(homology_pushforward(zoo::sphere_map(s3, 7), fundamental),
            HomologyClass(s3, 3, {7}));
  EXPECT_TRUE(
      homology_pushforward(zoo::sphere_map(s3, 0), fundamental).is_zero());
}

TEST(Pushforward, AdjunctionOnZooMaps) {
  for (const auto &f : zoo_maps()) {
    const auto &N = f.source();
    const auto &M = f.target();
    for (int d = 0; d <= std::min(N->dimension(), M->dimension()); ++d)
      for (std::size_t i = 0; i < N->rank(d); ++i)
        for (std::size_t j = 0; j < M->rank(d); ++j) {
          IntVector c(N->rank(d), Integer(0)), z(M->rank(d), Integer(0));
          c[i] = 1;
          z[j] = 1;
          const CohomologyClass cls(N, d, c);
          const HomologyClass cyc(M, d, z);
          EXPECT_EQ(kronecker(cls, homology_pushforward(f, cyc)),
                    kronecker(pullback(f, cls), cyc))
              << f.name() << " degree " << d;
        }
  }
}

TEST(Pullback, Examples) {
  const auto s2 = zoo::sphere(2);
  const auto u = gen(s2, "u");
  EXPECT_EQ(pullback(RingMap::identity(s2), u), u);
  EXPECT_EQ(pullback(zoo::sphere_map(s2, 5), u), Integer(5) * u);
}

TEST(RingMaps, ZooMapsValidate) {
  for (const auto &f : zoo_maps())
    EXPECT_TRUE(validate_map(f).empty()) << f.name();
}

TEST(RingMaps, NonMultiplicativeIsRejected) {
  const auto cp2 = zoo::complex_projective(2);
  RingMap f("bad", cp2, cp2,
            {IntMatrix{{1}}, IntMatrix(0, 0), IntMatrix{{2}}, IntMatrix(0, 0),
             IntMatrix{{1}}});
  EXPECT_FALSE(validate_map(f).empty());
  EXPECT_THROW(require_valid(f), ValidationError);
}

TEST(RingMaps, CompositionOrder) {
  const auto cp2 = zoo::complex_projective(2);
  const auto f = zoo::cpn_map(cp2, 2), g = zoo::cpn_map(cp2, 3);
  EXPECT_EQ(compose(f, g), zoo::cpn_map(cp2, 6));
}

TEST(Euler, Examples) {
  for (int n = 1; n <= 4; ++n)
    EXPECT_EQ(euler_characteristic(*zoo::complex_projective(n)), n + 1);
  EXPECT_EQ(euler_characteristic(*zoo::torus(2)), 0);
  EXPECT_EQ(euler_characteristic(*zoo::sphere(2)), 2);
  EXPECT_EQ(euler_characteristic(*zoo::surface(3)), -4);
}

TEST(Tensor, SphereSquaredRanks) {
  const auto s2 = zoo::sphere(2);
  const auto p = tensor_model(s2, s2);
  std::vector<std::size_t> ranks;
  for (int d = 0; d <= p->dimension(); ++d)
    ranks.push_back(p->rank(d));
  EXPECT_EQ(ranks, (std::vector<std::size_t>{1, 0, 2, 0, 1}));
  EXPECT_TRUE(validate_model(*p).empty());
}

TEST(Tensor, CircleSquaredIsTorus) {
  const auto s1 = zoo::sphere(1);
  const auto p = tensor_model(s1, s1);
  EXPECT_TRUE(validate_model(*p).empty());
  const auto a = gen(p, "u|1"), b = gen(p, "1|u");
  const auto w = cup(a, b);
  EXPECT_EQ(cup(b, a), Integer(-1) * w);
  EXPECT_EQ(evaluate(w), 1);
  // same ring as the zoo torus under e1 -> a, e2 -> b
  const auto t2 = zoo::torus(2);
  EXPECT_EQ(evaluate(cup(gen(t2, "e1"), gen(t2, "e2"))), evaluate(w));
}

TEST(Tensor, ProductsOfZooValidate) {
  const std::vector<ModelPtr> pieces{zoo::sphere(1), zoo::sphere(3),
                                     zoo::complex_projective(2),
                                     zoo::torus(2), zoo::surface(2)};
  for (const auto &a : pieces)
    for (const auto &b : pieces) {
      const auto p = tensor_model(a, b);
      EXPECT_TRUE(validate_model(*p).empty()) << p->name();
      EXPECT_EQ(euler_characteristic(*p),
                euler_characteristic(*a) * euler_characteristic(*b));
    }
}

TEST(Tensor, Maps) {
  const auto s2 = zoo::sphere(2);
  const auto id = RingMap::identity(s2);
  const auto p = tensor_model(s2, s2);
  EXPECT_EQ(tensor_map(id, id), RingMap::identity(p));

  const auto fg = tensor_map(zoo::sphere_map(s2, 2), zoo::sphere_map(s2, -3));
  EXPECT_TRUE(validate_map(fg).empty());
  const auto top = gen(fg.source(), "u|u");
  EXPECT_EQ(evaluate(pullback(fg, top)), -6);
}

TEST(Cross, KroneckerFactorizes) {
  const auto s1 = zoo::sphere(1), cp1 = zoo::complex_projective(1);
  const auto p = tensor_model(s1, cp1);
  const auto a = gen(s1, "u"), b = gen(cp1, "x");
  const HomologyClass z(s1, 1, {3}), w(cp1, 2, {5});
  EXPECT_EQ(kronecker(cross(a, b, p), cross(z, w, p)), 15);
}
