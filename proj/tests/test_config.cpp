#include "mg/config.hpp"

#include <gtest/gtest.h>

using namespace mg;

TEST(Config, ScalarsListsAndComments)
{
    auto c = RunConfig::parse("family = dnls   # comment\nb2 = 1\nb4 = 1/2\nc = [1, -2/3, 0.5]\n"
                              "m = [[1, 2], [3]]\n\n");
    EXPECT_EQ(c.str("family"), "dnls");
    EXPECT_EQ(c.rational("b4"), Rational(1, 2));
    auto v = c.rational_list("c");
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[1], Rational(-2, 3));
    EXPECT_EQ(v[2], Rational(1, 2));
    auto rows = c.rational_rows("m");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].size(), 1u);
    EXPECT_EQ(c.real("b4"), 0.5);
}

TEST(Config, Errors)
{
    EXPECT_THROW(RunConfig::parse("novalue\n"), Error);
    EXPECT_THROW(RunConfig::parse("a = 1\na = 2\n"), Error);
    EXPECT_THROW(RunConfig::parse("a = [1, 2\n"), Error);
    auto c = RunConfig::parse("a = x\nzzz = 1\n");
    EXPECT_THROW(c.rational("a"), Error);
    EXPECT_THROW(c.integer("a"), Error);
    EXPECT_THROW(c.str("missing"), Error);
    try {
        c.reject_unknown({"a"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
        EXPECT_NE(e.message().find("zzz"), std::string::npos);
    }
}

TEST(Config, ModelsFromConfig)
{
    auto d = std::get<Dnls>(model_from_config(RunConfig::parse("family = dnls\nb2 = 1\nb4 = 1/2\n")));
    EXPECT_EQ(d.b2, 1);
    EXPECT_EQ(d.b4, Rational(1, 2));
    auto w = std::get<Dnls>(model_from_config(RunConfig::parse("family = dnls\na3 = 1\na4 = 3\n")));
    EXPECT_EQ(w.b3, 2);
    EXPECT_EQ(w.b4, 2);
    auto dg = std::get<DoebnerGoldin>(model_from_config(RunConfig::parse("family = doebner-goldin\nD = 2/5\nc5 = 1/10\n")));
    EXPECT_TRUE(dg.canonical());
    auto ent = std::get<Entropic>(model_from_config(RunConfig::parse("family = entropic\nkappa = [[1, 2]]\nD = 1\n")));
    EXPECT_EQ(ent.kappa, RhoExpr::term(1, 2));
    auto ff = std::get<FiveFunction>(model_from_config(RunConfig::parse("family = five-function\nf5 = [[3, 1, 1]]\n")));
    EXPECT_EQ(ff.f[4], RhoExpr::term(3, 1, 1));
    EXPECT_THROW(model_from_config(RunConfig::parse("family = nosuch\n")), Error);
}

TEST(Config, GridSolverAndCoupled)
{
    auto c = RunConfig::parse("n = 64\nboundary = periodic\nx_min = 0\nx_max = 1\nscheme = rk4-spectral\ndt = 1e-4\n");
    auto g = grid_from_config(c);
    EXPECT_TRUE(g.periodic());
    EXPECT_EQ(g.n, 64);
    auto s = solver_from_config(c, 1e-10);
    EXPECT_EQ(s.scheme, Scheme::RK4Spectral);
    EXPECT_EQ(s.floor, 1e-10);
    EXPECT_THROW(grid_from_config(RunConfig::parse("n = 3\n")), Error);

    auto cm = coupled_from_config(RunConfig::parse(
        "p = 2\na = [1, 1]\nalpha = [[1, 1], [1, 1]]\nbeta = [[1, 1], [1, 1]]\nmultiplets = [[1, 2]]\n"
        "potential = [[1, 1, 2, 1/2]]\n"));
    EXPECT_EQ(cm.d[0][1], 1);
    EXPECT_EQ(cm.b[0][1], 0);
    EXPECT_EQ(cm.multiplets.size(), 1u);
    EXPECT_EQ(cm.lam[0][0][1], Rational(1, 2));
    EXPECT_THROW(coupled_from_config(RunConfig::parse("p = 2\na = [1, 0]\n")), Error);
}
