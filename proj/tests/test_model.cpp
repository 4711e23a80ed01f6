#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lpt/fixtures.hpp"
#include "lpt/model.hpp"
#include "lpt/verify.hpp"

using namespace lpt;

TEST_CASE("tabular space validation") {
    CHECK_THROWS(model::TabularSpace::create({}));
    CHECK_THROWS(model::TabularSpace::create({0.5, 0.6}));
    CHECK_THROWS(model::TabularSpace::create({-0.1, 1.1}));
    auto s = model::TabularSpace::create({0.25, 0.75});
    CHECK(s->atom_count() == 2);
    CHECK(s->cumulative().back() == 1.0);
}

TEST_CASE("function table validation") {
    auto s = model::TabularSpace::create({0.5, 0.5});
    CHECK_THROWS(model::FunctionTable::create(s, {1.0}));
    CHECK_THROWS(model::FunctionTable::create(s, {1.0, std::nan("")}));
    auto f = model::FunctionTable::create(s, {1.0, -2.0});
    CHECK(f.value(1) == -2.0);
}

TEST_CASE("midpoint: idempotence and arithmetic") {
    auto s = model::TabularSpace::create({0.5, 0.5});
    auto cls = model::HypothesisClass::tabular(s, {{0.0, 2.0}, {2.0, 0.0}}, 6.0, 4.0);

    SUBCASE("midpoint(f, f) = f") {
        const auto mid = cls.midpoint(0, 0);
        CHECK(mid == std::vector<double>{0.0, 2.0});
    }
    SUBCASE("tabular pointwise mean") {
        const auto mid = cls.midpoint(0, 1);
        CHECK(mid == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("linear weights") {
        auto feats = model::GenerativeSource::create(
            model::Distribution{model::Family::gaussian, 0.0, 1.0}, 6.0, 4.0, 2);
        auto lin = model::HypothesisClass::linear({{1.0, 0.0}, {0.0, 1.0}}, std::move(feats),
                                                  6.0, 4.0);
        CHECK(lin.midpoint(0, 1) == std::vector<double>{0.5, 0.5});
    }
}

TEST_CASE("midpoint closure: counting and containment") {
    SUBCASE("singleton stays singleton") {
        auto s = model::TabularSpace::create({1.0});
        auto cls = model::HypothesisClass::tabular(s, {{1.0}}, 6.0, 2.0);
        const auto closed = model::midpoint_closure(cls);
        CHECK(closed.size() == 1);
        CHECK(closed.label(0) == "f0");
    }
    SUBCASE("two distinct members give three") {
        auto s = model::TabularSpace::create({0.5, 0.5});
        auto cls = model::HypothesisClass::tabular(s, {{0.0, 2.0}, {2.0, 0.0}}, 6.0, 4.0);
        const auto closed = model::midpoint_closure(cls);
        CHECK(closed.size() == 3);
        // originals first (stable ids), then the midpoint
        CHECK(closed.label(0) == "f0");
        CHECK(closed.label(1) == "f1");
        CHECK(closed.label(2) == "(f0+f1)/2");
        CHECK(closed.row(2)[0] == 1.0);
    }
    SUBCASE("k linear members in general position: k(k+1)/2") {
        auto feats = model::GenerativeSource::create(
            model::Distribution{model::Family::gaussian, 0.0, 1.0}, 6.0, 8.0, 2);
        // derived by enumerating pairs and deduplicating by exact weights
        auto cls = model::HypothesisClass::linear(
            {{1.0, 0.0}, {0.0, 1.0}, {4.0, 1.0}, {2.0, -3.0}}, std::move(feats), 6.0, 8.0);
        const auto closed = model::midpoint_closure(cls);
        CHECK(closed.size() == 4 * 5 / 2);
        // one more midpoint round stays representable (linear weights)
        const auto closed2 = model::midpoint_closure(closed);
        CHECK(closed2.size() <= closed.size() * (closed.size() + 1) / 2);
        for (std::size_t g = 0; g < closed.size(); ++g)
            CHECK(closed2.row(g)[0] == closed.row(g)[0]);
    }
    SUBCASE("closure contains the input subset") {
        auto s = model::TabularSpace::create({0.25, 0.75});
        auto cls =
            model::HypothesisClass::tabular(s, {{0.0, 0.0}, {1.0, 0.5}, {3.0, -1.0}}, 6.0, 4.0);
        const auto closed = model::midpoint_closure(cls, {1, 2});
        CHECK(closed.size() == 3);
        CHECK(closed.label(0) == "f1");
        CHECK(closed.label(1) == "f2");
    }
}

TEST_CASE("find_fstar") {
    auto s = model::TabularSpace::create({0.5, 0.5});

    SUBCASE("exact zero-risk member wins") {
        auto y = model::FunctionTable::create(s, {1.0, 3.0});
        auto cls = model::HypothesisClass::tabular(s, {{2.0, 4.0}, {1.0, 3.0}}, 6.0, 8.0);
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        CHECK(t.fstar() == 1);
        CHECK(model::find_fstar(t) == 1);
    }
    SUBCASE("symmetric tie breaks to the lower index") {
        const double c = 1.5;
        auto y = model::FunctionTable::create(s, {c, c});
        auto cls = model::HypothesisClass::tabular(s, {{0.0, 0.0}, {2 * c, 2 * c}}, 6.0, 8.0);
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        CHECK(t.fstar() == 0);
        CHECK(*t.exact_risk(0) == doctest::Approx(c * c));
        CHECK(*t.exact_risk(1) == doctest::Approx(c * c));
    }
    SUBCASE("three members, hand-enumerated risks") {
        // space {0.25, 0.75}, Y = (2, 0):
        //   f0 = (0,0):   risk = 0.25*4            = 1
        //   f1 = (2,1):   risk = 0.75*1            = 0.75
        //   f2 = (1,0.5): risk = 0.25*1 + 0.75*0.25 = 0.4375
        auto sp = model::TabularSpace::create({0.25, 0.75});
        auto y = model::FunctionTable::create(sp, {2.0, 0.0});
        auto cls = model::HypothesisClass::tabular(
            sp, {{0.0, 0.0}, {2.0, 1.0}, {1.0, 0.5}}, 6.0, 8.0);
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        CHECK(*t.exact_risk(0) == doctest::Approx(1.0));
        CHECK(*t.exact_risk(1) == doctest::Approx(0.75));
        CHECK(*t.exact_risk(2) == doctest::Approx(0.4375));
        CHECK(t.fstar() == 2);
    }
    SUBCASE("generative backend: oracle-sample estimate agrees with exact risks") {
        const auto fx = fixtures::linear_student_t_suite();
        CHECK(fx.triplet.fstar() == 16);  // w0
        // exact formula risk vs Monte Carlo excess estimate, 3 stderr
        const auto exact = verify::excess_risk(fx.triplet, 0);
        const auto mc = verify::excess_risk_mc(fx.triplet, fx.triplet.cls().row(0), 200000, 3);
        CHECK(std::abs(mc.value - exact) <= 3.0 * mc.stderr_);
    }
}

TEST_CASE("class L_p bound enforcement") {
    auto s = model::TabularSpace::create({0.125, 0.875});
    // ||f||_6 = K q^{1/6} = 2 exactly at the extremal K
    const double K = std::pow(2.0, 1.5);
    CHECK_NOTHROW(model::HypothesisClass::tabular(s, {{K, 0.0}}, 6.0, 2.0));
    CHECK_THROWS(model::HypothesisClass::tabular(s, {{1.05 * K, 0.0}}, 6.0, 2.0));

    // member_lp_bound is the exact norm on the tabular backend
    auto cls = model::HypothesisClass::tabular(s, {{K, 0.0}}, 6.0, 2.0);
    CHECK(cls.member_lp_bound(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("generative source validation") {
    model::Distribution t55{model::Family::student_t, 5.5, 1.0};
    CHECK_NOTHROW(model::GenerativeSource::create(t55, 5.0, 3.0));
    // p = 6 > df: infinite moment
    CHECK_THROWS(model::GenerativeSource::create(t55, 6.0, 3.0));
    // declared bound below the true norm
    CHECK_THROWS(model::GenerativeSource::create(t55, 5.0, 1.0));

    // closed forms: two_point and pareto
    model::Distribution tp{model::Family::two_point, 2.0, 0.25};
    CHECK(tp.lp_norm(4.0) == doctest::Approx(2.0 * std::pow(0.25, 0.25)));
    model::Distribution pa{model::Family::pareto, 7.0, 1.0};
    CHECK(pa.lp_norm(6.0) == doctest::Approx(std::pow(7.0, 1.0 / 6.0)));

    // gaussian with nonzero mean: quadrature against the central closed form
    model::Distribution g0{model::Family::gaussian, 0.0, 2.0};
    model::Distribution g1{model::Family::gaussian, 1e-14, 2.0};
    CHECK(g1.lp_norm(4.0) == doctest::Approx(g0.lp_norm(4.0)).epsilon(1e-6));
}

TEST_CASE("serialization round-trip") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "lpt_model_io";
    fs::create_directories(dir);

    SUBCASE("tabular: bit-exact") {
        const auto fx = fixtures::club_suite();
        const auto& cls = fx.triplet.cls();
        const auto path = (dir / "club.cls").string();
        model::save_class(path, cls);
        const auto back = model::load_class(path);
        REQUIRE(back.size() == cls.size());
        CHECK(back.p() == cls.p());
        CHECK(back.M() == cls.M());
        for (std::size_t g = 0; g < cls.size(); ++g) {
            CHECK(back.label(g) == cls.label(g));
            for (std::size_t a = 0; a < cls.dim(); ++a) CHECK(back.row(g)[a] == cls.row(g)[a]);
        }
        for (std::size_t a = 0; a < cls.dim(); ++a)
            CHECK(back.space()->prob(a) == cls.space()->prob(a));
    }
    SUBCASE("linear: bit-exact weights and feature spec") {
        const auto fx = fixtures::linear_student_t_suite();
        const auto& cls = fx.triplet.cls();
        const auto path = (dir / "linear.cls").string();
        model::save_class(path, cls);
        const auto back = model::load_class(path);
        REQUIRE(back.size() == cls.size());
        CHECK(back.features().dist().a == cls.features().dist().a);
        CHECK(back.features().dist().b == cls.features().dist().b);
        for (std::size_t g = 0; g < cls.size(); ++g)
            for (std::size_t k = 0; k < cls.dim(); ++k) CHECK(back.row(g)[k] == cls.row(g)[k]);
    }
}
