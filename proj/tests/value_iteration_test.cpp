#include "zecap/corpus.hpp"
#include "zecap/value_iteration.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace zecap;

namespace {

ValueIterationResult run_fixed(const RawChannel& raw, std::size_t iters) {
    ValueIterationOptions opt;
    opt.max_iters = iters;
    opt.stop_when_converged = false;
    return run_value_iteration(validate(raw), opt);
}

const double log_phi = std::log2((1.0 + std::sqrt(5.0)) / 2.0);

} // namespace

TEST(ApplyT, Example1FromZero) {
    const auto ch = validate(corpus::example1());
    const auto [j, policy] = apply_t(ch, ValueFunction::zero(2));
    EXPECT_NEAR(j.values[0], 0.0, 1e-12);
    EXPECT_NEAR(j.values[1], 1.0, 1e-12);
    EXPECT_EQ(j.iteration, 1u);
    EXPECT_NEAR(policy.rows[1][0], 0.5, 1e-12);
    EXPECT_NEAR(policy.rows[1][1], 0.5, 1e-12);
}

TEST(ApplyT, Example2FromZero) {
    const auto ch = validate(corpus::example2());
    const auto j = apply_t(ch, ValueFunction::zero(2)).first;
    EXPECT_NEAR(j.values[0], 0.0, 1e-12);
    EXPECT_NEAR(j.values[1], 1.0, 1e-12);
}

TEST(ApplyT, ThreadCountDoesNotChangeResults) {
    const auto ch = validate(corpus::example3_reconstructed());
    ValueFunction j = ValueFunction::zero(3);
    for (int n = 0; n < 10; ++n) {
        const auto one = apply_t(ch, j, 1);
        const auto many = apply_t(ch, j, 3);
        EXPECT_EQ(one.first.values, many.first.values);
        for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(one.second.rows[s].weights, many.second.rows[s].weights);
        j = one.first;
    }
}

TEST(RunValueIteration, Example1) {
    const auto run = run_fixed(corpus::example1(), 50);
    EXPECT_GE(run.estimate.lower, 0.49);
    EXPECT_LE(run.estimate.upper, 0.51);
    EXPECT_NEAR(run.trace.back().lower, 0.5, 1e-9);
    EXPECT_NEAR(run.trace.back().upper, 0.5, 1e-9);
    for (std::size_t n = 2; n <= 50; ++n) {
        for (double g : averaged_gain(run.values, n)) EXPECT_NEAR(g, 0.5, 1e-9) << "n=" << n;
        // The raw one-step gain alternates between 0 and 1 on this periodic chain.
        EXPECT_NEAR(run.trace[n - 1].gain_lo, 0.0, 1e-9);
        EXPECT_NEAR(run.trace[n - 1].gain_hi, 1.0, 1e-9);
    }
    EXPECT_TRUE(run.converged);
    EXPECT_NEAR(run.estimate.point_estimate, 0.5, 1e-9);
}

TEST(RunValueIteration, Example2) {
    const auto run = run_fixed(corpus::example2(), 100);
    EXPECT_NEAR(run.estimate.point_estimate, log_phi, 1e-4);
    const auto& p1 = run.estimate.policies.back().rows[1];
    EXPECT_NEAR(p1[0], (3.0 - std::sqrt(5.0)) / 2.0, 1e-5);
}

TEST(RunValueIteration, Example3) {
    const auto run = run_fixed(corpus::example3_reconstructed(), 50);
    for (std::size_t s = 0; s < 3; ++s)
        EXPECT_NEAR(run.values[50].values[s] - run.values[49].values[s], 1.1028, 1e-3);
}

TEST(RunValueIteration, EarlyStop) {
    ValueIterationOptions opt;
    opt.max_iters = 100;
    opt.gap_tol = 1e-3;
    const auto run = run_value_iteration(validate(corpus::example2()), opt);
    EXPECT_TRUE(run.converged);
    EXPECT_LT(run.estimate.iterations, 100u);
    EXPECT_EQ(run.trace.size(), run.estimate.iterations);
    EXPECT_EQ(run.estimate.policies.size(), run.estimate.iterations);
    EXPECT_LE(run.estimate.gain_hi - run.estimate.gain_lo, 1e-3);
}

TEST(RunValueIteration, NotConverged) {
    ValueIterationOptions opt;
    opt.max_iters = 3;
    opt.gap_tol = 1e-12;
    EXPECT_FALSE(run_value_iteration(validate(corpus::example2()), opt).converged);
}

TEST(RunValueIteration, CapacityZeroPinsEstimate) {
    const auto run = run_fixed(corpus::all_adjacent_dmc(), 10);
    EXPECT_EQ(run.positivity.decision, Decision::capacity_zero);
    EXPECT_EQ(run.estimate.lower, 0.0);
    EXPECT_EQ(run.estimate.upper, 0.0);
    EXPECT_EQ(run.estimate.point_estimate, 0.0);
    EXPECT_EQ(run.trace.size(), 10u);
}

TEST(RunValueIteration, RejectsBadOptions) {
    ValueIterationOptions opt;
    opt.max_iters = 0;
    EXPECT_THROW(run_value_iteration(validate(corpus::example1()), opt), Error);
}

TEST(RunValueIteration, EstimateOrdering) {
    for (const auto& e : load_corpus()) {
        for (std::size_t iters : {5u, 30u}) {
            const auto run = run_fixed(e.channel, iters);
            const auto& est = run.estimate;
            EXPECT_LE(est.lower, est.point_estimate + 1e-6) << e.name;
            EXPECT_LE(est.point_estimate, est.upper + 1e-6) << e.name;
            for (const auto& v : run.values)
                for (double x : v.values) EXPECT_GE(x, -1e-12);
        }
    }
}

TEST(RunValueIteration, SingleStateGainMatchesDmcCapacity) {
    for (const auto& raw : {corpus::pentagon(), corpus::identity_dmc(2), corpus::identity_dmc(3)}) {
        const auto ch = validate(raw);
        const double c = dmc_capacity(ch);
        const auto run = run_fixed(raw, 10);
        for (std::size_t n = 1; n <= 10; ++n) {
            EXPECT_NEAR(run.trace[n - 1].gain_lo, c, 1e-9);
            EXPECT_NEAR(averaged_gain(run.values, n)[0], c, 1e-9);
        }
    }
}

TEST(WTable, Example2IsFibonacci) {
    const auto w = w_table(validate(corpus::example2()), 5);
    const std::vector<std::vector<double>> expected{{1, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 8}, {8, 13}};
    ASSERT_EQ(w.size(), expected.size());
    for (std::size_t n = 0; n < w.size(); ++n)
        for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(w[n][s] / expected[n][s], 1.0, 1e-9);
}

TEST(WTable, Example1ClosedForm) {
    const auto w = w_table(validate(corpus::example1()), 6);
    for (std::size_t n = 1; n <= 6; ++n) {
        EXPECT_NEAR(w[n][0] / std::exp2(double(n / 2)), 1.0, 1e-9);
        EXPECT_NEAR(w[n][1] / std::exp2(double((n + 1) / 2)), 1.0, 1e-9);
    }
}

TEST(WTable, ZeroHorizonIsOnes) {
    for (const auto& e : load_corpus()) {
        const auto w = w_table(validate(e.channel), 0);
        ASSERT_EQ(w.size(), 1u);
        for (double v : w[0]) EXPECT_EQ(v, 1.0);
    }
}

TEST(WTable, Overflow) {
    EXPECT_THROW(w_table(validate(corpus::identity_dmc(2)), 1100), OverflowError);
}

TEST(DmcCapacity, Values) {
    EXPECT_NEAR(dmc_capacity(validate(corpus::identity_dmc(2))), 1.0, 1e-12);
    EXPECT_NEAR(dmc_capacity(validate(corpus::identity_dmc(3))), std::log2(3.0), 1e-12);
    EXPECT_NEAR(dmc_capacity(validate(corpus::pentagon())), std::log2(2.5), 1e-12);
    EXPECT_EQ(dmc_capacity(validate(corpus::all_adjacent_dmc())), 0.0);
    EXPECT_THROW(dmc_capacity(validate(corpus::example1())), NotSingleStateError);
}

TEST(TraceCsv, RoundTripAtTwelveDigits) {
    const auto run = run_fixed(corpus::example3_reconstructed(), 30);
    std::stringstream buf;
    write_trace_csv(buf, run.trace);
    const auto back = read_trace_csv(buf);
    ASSERT_EQ(back.size(), run.trace.size());
    auto round12 = [](double v) {
        std::ostringstream os;
        os.precision(12);
        os << v;
        return os.str();
    };
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].n, run.trace[i].n);
        EXPECT_EQ(round12(back[i].lower), round12(run.trace[i].lower));
        EXPECT_EQ(round12(back[i].upper), round12(run.trace[i].upper));
        EXPECT_EQ(round12(back[i].gain_lo), round12(run.trace[i].gain_lo));
        EXPECT_EQ(round12(back[i].gain_hi), round12(run.trace[i].gain_hi));
    }
    std::stringstream rewritten;
    write_trace_csv(rewritten, back);
    std::stringstream original;
    write_trace_csv(original, run.trace);
    EXPECT_EQ(rewritten.str(), original.str());
}

TEST(TraceCsv, RejectsGarbage) {
    std::stringstream no_header("1,2,3,4,5\n");
    EXPECT_THROW(read_trace_csv(no_header), ParseError);
    std::stringstream bad_row("n,lower,upper,gain_lo,gain_hi\n1;2;3\n");
    EXPECT_THROW(read_trace_csv(bad_row), ParseError);
}
