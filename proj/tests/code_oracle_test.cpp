#include "zecap/code_oracle.hpp"
#include "zecap/corpus.hpp"
#include "random_channels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace zecap;

namespace {

ValueIterationResult run_fixed(const Channel& ch, std::size_t iters) {
    ValueIterationOptions opt;
    opt.max_iters = iters;
    opt.stop_when_converged = false;
    return run_value_iteration(ch, opt);
}

using Counts = std::vector<std::uint64_t>;

} // namespace

TEST(ExactMessageCount, Example2IsFibonacci) {
    const auto m = exact_message_count(validate(corpus::example2()), 5);
    ASSERT_EQ(m.size(), 6u);
    const Counts s0{1, 1, 2, 3, 5, 8}, s1{1, 2, 3, 5, 8, 13};
    for (std::size_t n = 0; n <= 5; ++n) {
        EXPECT_EQ(m[n][0], s0[n]) << n;
        EXPECT_EQ(m[n][1], s1[n]) << n;
    }
}

TEST(ExactMessageCount, Example1NoiselessState) {
    const auto m = exact_message_count(validate(corpus::example1()), 6);
    for (std::size_t n = 1; n <= 6; ++n) {
        EXPECT_EQ(m[n][1], std::uint64_t{1} << ((n + 1) / 2));
        EXPECT_EQ(m[n][0], std::uint64_t{1} << (n / 2));
    }
}

TEST(ExactMessageCount, CapacityZeroIsOne) {
    const auto m = exact_message_count(validate(corpus::all_adjacent_dmc()), 6);
    for (const auto& row : m) EXPECT_EQ(row, (Counts{1}));
}

TEST(ExactMessageCount, Pentagon) {
    const auto m = exact_message_count(validate(corpus::pentagon()), 4);
    EXPECT_EQ(m[1][0], 2u);
    EXPECT_EQ(m[2][0], 5u);
    EXPECT_EQ(m[3][0], 12u);
    EXPECT_EQ(m[4][0], 30u);
}

TEST(ExactMessageCount, CountCapIsEnforced) {
    MessageCountOptions opt;
    opt.count_cap = 10;
    EXPECT_THROW(exact_message_count(validate(corpus::identity_dmc(2)), 5, opt), SearchBudgetExceededError);
}

TEST(ExactMessageCount, AgreesWithTreeEnumeration) {
    std::mt19937_64 rng(41);
    std::vector<Channel> channels{validate(corpus::example1()), validate(corpus::example2())};
    for (int i = 0; i < 40; ++i) channels.push_back(testkit::random_channel(rng, {3, 2, 3, 0.35}));
    for (const auto& ch : channels) {
        const auto m = exact_message_count(ch, 3);
        for (std::size_t n = 1; n <= 3; ++n)
            for (std::size_t s = 0; s < ch.num_states(); ++s) {
                if (m[n][s] >= 9) continue;
                EXPECT_EQ(max_messages_by_tree_search(ch, s, n, 9), m[n][s]) << "n=" << n << " s=" << s;
            }
    }
}

TEST(ExactMessageCount, MonotoneAndSuperadditiveOnCorpus) {
    for (const auto& e : load_corpus()) {
        const auto ch = validate(e.channel);
        const auto m = exact_message_count(ch, 6);
        auto a = [&](std::size_t n) {
            return std::log2(double(*std::min_element(m[n].begin(), m[n].end())));
        };
        for (std::size_t n = 0; n < 6; ++n)
            for (std::size_t s = 0; s < ch.num_states(); ++s) EXPECT_GE(m[n + 1][s], m[n][s]) << e.name;
        for (std::size_t n = 1; n <= 5; ++n)
            for (std::size_t k = 1; n + k <= 6; ++k) EXPECT_GE(a(n + k) + 1e-12, a(n) + a(k)) << e.name;
    }
}

TEST(PartitionMessages, Examples) {
    EXPECT_EQ(partition_messages(8, InputPmf{{0.5, 0.5}}), (Counts{4, 4}));
    const double inv_phi = 2.0 / (1.0 + std::sqrt(5.0));
    EXPECT_EQ(partition_messages(5, InputPmf{{inv_phi, 1.0 - inv_phi}}), (Counts{3, 2}));
    EXPECT_EQ(partition_messages(3, InputPmf{{0.0, 1.0}}), (Counts{0, 3}));
    EXPECT_THROW(partition_messages(3, InputPmf{{0.0, 0.0}}), Error);
}

TEST(PartitionMessages, ProportionalWithinOneOverCount) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::uint64_t> count_dist(1, 5000);
    std::uniform_int_distribution<std::size_t> size_dist(1, 6);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::bernoulli_distribution zero(0.25);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto count = count_dist(rng);
        InputPmf pmf{std::vector<double>(size_dist(rng))};
        double total = 0.0;
        for (double& v : pmf.weights) total += (v = zero(rng) ? 0.0 : w(rng));
        if (total == 0.0) pmf.weights[0] = total = 1.0;
        for (double& v : pmf.weights) v /= total;

        const auto sizes = partition_messages(count, pmf);
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            sum += sizes[i];
            if (pmf[i] == 0.0) {
                EXPECT_EQ(sizes[i], 0u);
            } else {
                EXPECT_LT(std::abs(double(sizes[i]) / double(count) - pmf[i]), 1.0 / double(count));
            }
        }
        EXPECT_EQ(sum, count);
    }
}

TEST(CodeTree, Example2FromNoiselessState) {
    const auto ch = validate(corpus::example2());
    const auto run = run_fixed(ch, 5);
    const auto tree = build_code_tree(ch, 1, 5, run);
    EXPECT_EQ(tree.message_count, 13u);
    const auto v = verify_code_tree(ch, tree);
    EXPECT_TRUE(v.pass) << v.failure;
    EXPECT_LE(v.max_depth, 5u + 2u * 4u);
    EXPECT_EQ(v.max_ambiguity, 1u);
}

TEST(CodeTree, Example1TwoMessagesNoCleanup) {
    const auto ch = validate(corpus::example1());
    const auto run = run_fixed(ch, 2);
    const auto tree = build_code_tree(ch, 1, 2, run);
    EXPECT_EQ(tree.message_count, 2u);
    const auto v = verify_code_tree(ch, tree);
    EXPECT_TRUE(v.pass);
    EXPECT_LE(v.max_depth, 2u);
}

TEST(CodeTree, SingleMessageIsALeaf) {
    const auto ch = validate(corpus::example2());
    const auto run = run_fixed(ch, 3);
    const auto tree = build_code_tree(ch, 0, std::span(run.estimate.policies), 1);
    ASSERT_EQ(tree.nodes.size(), 1u);
    EXPECT_TRUE(tree.nodes[0].inputs.empty());
    const auto v = verify_code_tree(ch, tree);
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.max_depth, 0u);
}

TEST(CodeTree, AdjacentInputsWithSharedContinuationFail) {
    const auto ch = validate(corpus::example1());
    CodeTree tree;
    tree.root_state = 0;
    tree.message_count = 2;
    tree.nodes.push_back({0, 0, {0, 1}, {0, 1}, {}});
    for (std::size_t y = 0; y < 2; ++y) {
        tree.nodes[0].children.push_back({y, 1, tree.nodes.size()});
        tree.nodes.push_back({1, 1, {0, 1}, {}, {}});
    }
    const auto v = verify_code_tree(ch, tree);
    EXPECT_FALSE(v.pass);
    EXPECT_EQ(v.max_ambiguity, 2u);
}

TEST(CodeTree, TamperedChildIsCaught) {
    const auto ch = validate(corpus::example2());
    const auto run = run_fixed(ch, 4);
    auto tree = build_code_tree(ch, 1, 4, run);
    ASSERT_GT(tree.nodes.size(), 1u);
    tree.nodes[1].messages.pop_back();
    EXPECT_FALSE(verify_code_tree(ch, tree).pass);
}

TEST(CodeTree, FloorWMessagesOnCorpus) {
    for (const auto& e : load_corpus()) {
        const auto ch = validate(e.channel);
        if (decide_positivity(ch).decision == Decision::capacity_zero) continue;
        const auto run = run_fixed(ch, 8);
        for (std::size_t n = 1; n <= 8; ++n)
            for (std::size_t s = 0; s < ch.num_states(); ++s) {
                const auto tree = build_code_tree(ch, s, n, run);
                EXPECT_EQ(tree.message_count, std::uint64_t(std::floor(std::exp2(run.values[n].values[s]) + 1e-9)));
                const auto v = verify_code_tree(ch, tree);
                EXPECT_TRUE(v.pass) << e.name << " n=" << n << " s=" << s << ": " << v.failure;
            }
    }
}

TEST(CodeTree, JsonShape) {
    const auto ch = validate(corpus::example1());
    const auto run = run_fixed(ch, 2);
    const auto j = to_json(ch, build_code_tree(ch, 1, 2, run));
    EXPECT_EQ(j["state"], "1");
    EXPECT_EQ(j["messages"].size(), 2u);
    EXPECT_TRUE(j["children"].is_array());
}
