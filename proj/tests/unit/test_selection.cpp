#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "srdreg/error.hpp"
#include "srdreg/random.hpp"
#include "srdreg/selection.hpp"

using namespace srdreg;

TEST(LocalFdr, Examples) {
    EXPECT_EQ(local_fdr(std::vector<double>(10, 0.0)), 1.0);
    EXPECT_EQ(local_fdr(std::vector<double>{0.5, -0.2, 0.0011}), 0.0);
    EXPECT_EQ(local_fdr(std::vector<double>{0.0005, 0.002, -0.0009, 0.5}, 0.001), 0.5);
    EXPECT_EQ(local_fdr(std::vector<double>{0.001, -0.001}, 0.001), 1.0);
}

TEST(LocalFdr, OrderInvariantAndPerColumn) {
    auto rng = make_rng(1);
    std::normal_distribution<double> normal(0.0, 0.002);
    std::vector<double> v(999);
    for (auto& x : v) x = normal(rng);
    const double p = local_fdr(v);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(local_fdr(v), p);

    PosteriorDraws draws;
    draws.beta.resize(999, 2);
    draws.beta.col(0) = Eigen::Map<Eigen::VectorXd>(v.data(), 999);
    draws.beta.col(1).setConstant(1.0);
    const auto ps = local_fdr(draws);
    EXPECT_EQ(ps(0), p);
    EXPECT_EQ(ps(1), 0.0);
}

TEST(FdrThreshold, WorkedExample) {
    const std::vector<double> p{0.10, 0.50, 0.01, 0.02};
    const auto t = fdr_threshold(p, 0.05);
    EXPECT_EQ(t.u, 3u);
    EXPECT_EQ(t.phi, 0.10);
    EXPECT_EQ(t.selected, (std::vector<char>{0, 0, 1, 1}));
    EXPECT_EQ(t.selected_count(), 2u);
}

TEST(FdrThreshold, AllZeroSelectsNothing) {
    const auto t = fdr_threshold(std::vector<double>(5, 0.0), 0.05);
    EXPECT_EQ(t.phi, 0.0);
    EXPECT_EQ(t.selected_count(), 0u);
}

TEST(FdrThreshold, NoQualifyingPrefix) {
    const auto t = fdr_threshold(std::vector<double>{0.3, 0.6}, 0.05);
    EXPECT_EQ(t.u, 0u);
    EXPECT_EQ(t.phi, 0.0);
    EXPECT_EQ(t.selected_count(), 0u);
}

TEST(FdrThreshold, AlphaOneTakesEverything) {
    const std::vector<double> p{0.9, 0.2, 0.4};
    const auto t = fdr_threshold(p, 1.0);
    EXPECT_EQ(t.u, 3u);
    EXPECT_EQ(t.phi, 0.9);
    EXPECT_EQ(t.selected, (std::vector<char>{0, 1, 1}));
}

TEST(FdrThreshold, Errors) {
    EXPECT_THROW(fdr_threshold(std::vector<double>{}, 0.05), DataError);
    EXPECT_THROW(fdr_threshold(std::vector<double>{0.1}, 0.0), DataError);
    EXPECT_THROW(fdr_threshold(std::vector<double>{1.5}, 0.05), DataError);
}

TEST(FdrThreshold, MonotoneInAlphaAndSelfConsistent) {
    auto rng = make_rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> p(1 + rep % 40);
        for (auto& x : p) x = std::pow(u(rng), 3);
        std::vector<double> alphas{0.01, 0.05, 0.1, 0.2, 0.5};
        FdrThreshold previous = fdr_threshold(p, alphas[0]);
        for (double a : alphas) {
            const auto t = fdr_threshold(p, a);
            EXPECT_GE(t.phi, previous.phi);
            for (std::size_t i = 0; i < p.size(); ++i)
                if (previous.selected[i]) {
                    EXPECT_TRUE(t.selected[i]);
                }
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (t.selected[i]) sum += p[i];
            if (t.selected_count() > 0) {
                EXPECT_LE(sum / static_cast<double>(t.selected_count()), a + 1e-15);
            }
            for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(static_cast<bool>(t.selected[i]), p[i] < t.phi);
            previous = t;
        }
    }
}

TEST(Spearman, Cases) {
    const std::vector<double> a{1, 5, 2, 8, 3};
    EXPECT_NEAR(spearman(a, a).rho, 1.0, 1e-15);
    std::vector<double> neg(a);
    for (auto& x : neg) x = -x;
    EXPECT_NEAR(spearman(a, neg).rho, -1.0, 1e-15);
    const auto flat = spearman(a, std::vector<double>(5, 2.0));
    EXPECT_TRUE(flat.undefined);
    EXPECT_EQ(flat.rho, 0.0);
    // Ties take average ranks: ranks {1, 2.5, 2.5, 4} against {1, 2, 3, 4}.
    const std::vector<double> tied{1, 2, 2, 3}, plain{1, 2, 3, 4};
    EXPECT_NEAR(spearman(tied, plain).rho, 4.5 / std::sqrt(4.5 * 5.0), 1e-14);
    EXPECT_THROW(spearman(a, plain), DataError);
}

TEST(Spearman, FitAgainstDesign) {
    Eigen::MatrixXd X(4, 2);
    X << 1, 0, 2, 1, 3, 0, 4, 2;
    Eigen::VectorXd beta(2);
    beta << 1.0, 0.5;
    const Eigen::VectorXd y = X * beta;
    EXPECT_NEAR(spearman_fit(y, X, beta).rho, 1.0, 1e-15);
    EXPECT_NEAR(spearman_fit(-y, X, beta).rho, -1.0, 1e-15);
    EXPECT_TRUE(spearman_fit(y, X, Eigen::VectorXd::Zero(2)).undefined);
}

namespace {

PosteriorDraws constructed_draws() {
    auto rng = make_rng(3);
    std::normal_distribution<double> strong(1.0, 0.1), null(0.0, 0.0005);
    PosteriorDraws d;
    d.beta.resize(400, 3);
    for (int s = 0; s < 400; ++s) {
        d.beta(s, 0) = strong(rng);
        d.beta(s, 1) = null(rng);
        d.beta(s, 2) = s % 10 == 0 ? 0.0 : -0.5 + null(rng);
    }
    d.column_names = {"A.1", "A.2", "B.1"};
    d.group_of_column = {1, 1, 2};
    return d;
}

}  // namespace

TEST(Select, ReportSemantics) {
    const auto report = select(constructed_draws(), 0.05, 0.001, "pw");
    EXPECT_EQ(report.pathway, "pw");
    EXPECT_EQ(report.p(0), 0.0);
    EXPECT_GT(report.p(1), 0.9);
    EXPECT_NEAR(report.p(2), 0.1, 1e-12);
    // Sorted p: 0, 0.1, ~0.95; prefix means 0, 0.05, ... so u = 2 and phi = 0.1.
    EXPECT_EQ(report.phi, 0.1);
    EXPECT_EQ(report.selected, (std::vector<char>{1, 0, 0}));
    EXPECT_NEAR(report.beta_map(0), 1.0, 0.05);
    EXPECT_EQ(report.beta_post(0), report.beta_map(0));
    EXPECT_EQ(report.beta_post(1), 0.0);
    EXPECT_EQ(report.beta_post(2), 0.0);
}

TEST(Select, CsvRoundTrip) {
    const auto report = select(constructed_draws(), 0.2, 0.001, "pw");
    const auto dir = fixtures::temp_dir("selection_io");
    write_selection_csv(dir / "s.csv", report, "00000000000000aa");
    const auto text = fixtures::read_file(dir / "s.csv");
    EXPECT_NE(text.find("column,group,p_gk,beta_map,selected,phi_alpha,alpha,c,beta_post\n"), std::string::npos);
    const auto back = read_selection_csv(dir / "s.csv");
    EXPECT_EQ(back.column_names, report.column_names);
    EXPECT_EQ(back.group_of_column, report.group_of_column);
    EXPECT_EQ(back.selected, report.selected);
    EXPECT_EQ(back.phi, report.phi);
    EXPECT_LT((back.beta_post - report.beta_post).cwiseAbs().maxCoeff(), 1e-15);
}
