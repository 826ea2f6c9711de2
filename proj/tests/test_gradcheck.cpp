#include <doctest.h>

#include <cmath>

#include "neglectnet/gradcheck_suite.hpp"
#include "neglectnet/ops.hpp"
#include "precision_probe.hpp"
#include "test_util.hpp"

using namespace neglectnet;

TEST_SUITE("gradcheck")
{
    TEST_CASE("mean is checked exactly")
    {
        Rng rng(1);
        auto x = testutil::randn({2, 3, 4, 4}, rng);
        const double err = grad_check([](const std::vector<Tensor>& in) { return mean(in[0]); }, {x}, 1e-3);
        CHECK(err < 1e-9);
    }

    TEST_CASE("conv2d example from the op contract")
    {
        Rng rng(2);
        auto x = testutil::randn({1, 2, 6, 6}, rng);
        auto w = testutil::randn({3, 2, 3, 3}, rng, 0.5);
        auto f = [](const std::vector<Tensor>& in) { return mean(sigmoid(conv2d(in[0], in[1], Tensor(), 1, 1))); };
        CHECK(grad_check(f, {x, w}, 1e-3) < 1e-3);
    }

    TEST_CASE("every op passes below the op tolerance")
    {
        for (uint64_t seed : {1u, 2u}) {
            for (const auto& entry : run_gradchecks(op_gradcheck_cases(seed)).entries) {
                INFO(entry.name, " seed ", seed, " error ", entry.result.max_rel_error, " ", entry.error);
                CHECK(entry.passed);
                CHECK(entry.result.max_rel_error < 1e-3);
            }
        }
    }

    TEST_CASE("end-to-end networks pass below the network tolerance")
    {
        const auto report = run_gradchecks(network_gradcheck_cases(1));
        CHECK(report.entries.size() == 4);
        for (const auto& entry : report.entries) {
            INFO(entry.name, " error ", entry.result.max_rel_error, " ", entry.error);
            CHECK(entry.passed);
            CHECK(entry.result.max_rel_error < 1e-2);
        }
    }

    TEST_CASE("a wrong backward rule is reported")
    {
        const auto report = run_gradchecks({faulty_gradcheck_case(1)});
        REQUIRE(report.entries.size() == 1);
        CHECK_FALSE(report.entries[0].passed);
        CHECK(report.entries[0].result.max_rel_error == doctest::Approx(0.5).epsilon(1e-3));
        CHECK_FALSE(report.all_passed());
    }

    TEST_CASE("non-finite loss raises a numeric error")
    {
        auto x = Tensor::full({1, 1, 2, 2}, 1);
        auto f = [](const std::vector<Tensor>& in) { return affine(mean(in[0]), std::nan(""), 0); };
        CHECK_THROWS_AS(grad_check(f, {x}, 1e-3), NumericError);
    }

    TEST_CASE("32-bit analytic gradients agree with 64-bit ones")
    {
        for (bool deconv : {false, true}) {
            const auto g32 = probe::generator_grads_f32(5, deconv);
            const auto g64 = probe::generator_grads_f64(5, deconv);
            REQUIRE(g32.size() == g64.size());
            double scale = 0, worst = 0;
            for (double v : g64) scale = std::max(scale, std::abs(v));
            for (size_t i = 0; i < g32.size(); ++i) worst = std::max(worst, std::abs(g32[i] - g64[i]));
            INFO("deconv ", deconv, " worst abs diff ", worst, " scale ", scale);
            CHECK(scale > 0);
            CHECK(worst < 1e-4 * scale);
        }
    }
}
