#include <doctest.h>

#include <algorithm>

#include "neglectnet/discriminator.hpp"
#include "neglectnet/generator.hpp"
#include "neglectnet/ops.hpp"
#include "test_util.hpp"

using namespace neglectnet;

namespace {

NetConfig small_config(int depth = 3, int size = 32)
{
    NetConfig c;
    c.depth = depth;
    c.base_width = 4;
    c.max_width = 16;
    c.image_h = size;
    c.image_w = size;
    c.disc_depth = 3;
    return c;
}

bool bit_identical(const Tensor& a, const Tensor& b)
{
    return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

Tensor random_image(const NetConfig& c, int64_t batch, uint64_t seed)
{
    Rng rng(seed);
    return testutil::uniform({batch, 3, c.image_h, c.image_w}, rng, -1, 1);
}

std::pair<Real, Real> value_range(const Tensor& t)
{
    auto [lo, hi] = std::minmax_element(t.data().begin(), t.data().end());
    return {*lo, *hi};
}

}  // namespace

TEST_SUITE("generator")
{
    TEST_CASE("encoder widths follow the kernel-count formula")
    {
        auto c = NetConfig::full_scale();
        const std::vector<int> expected{64, 128, 256, 512, 512, 512, 512};
        for (int i = 1; i <= 7; ++i) CHECK(c.width(i) == expected[static_cast<size_t>(i - 1)]);

        NetConfig s;
        s.depth = 3;
        s.base_width = 8;
        s.max_width = 32;
        auto g = build_generator(s, 1);
        CHECK(g.params.at("enc.1.weight").dim(0) == 8);
        CHECK(g.params.at("enc.2.weight").dim(0) == 16);
        CHECK(g.params.at("enc.3.weight").dim(0) == 32);
    }

    TEST_CASE("full-scale parameter shapes")
    {
        auto g = build_generator(NetConfig::full_scale(), 3);
        const std::vector<int> widths{64, 128, 256, 512, 512, 512, 512};
        for (int i = 1; i <= 7; ++i) {
            const auto& w = g.params.at("enc." + std::to_string(i) + ".weight");
            CHECK(w.dim(0) == widths[static_cast<size_t>(i - 1)]);
            CHECK(w.dim(2) == 4);
        }
        CHECK(g.params.at("seg.7.weight").shape() == Shape{512, 512, 4, 4});
        CHECK(g.params.at("seg.6.weight").shape() == Shape{1024, 512, 4, 4});
        CHECK(g.params.at("seg.1.weight").shape() == Shape{128, 1, 4, 4});
        CHECK(g.params.at("fill.1.weight").shape() == Shape{3, 128, 3, 3});
        CHECK(g.params.at("neglect.7.weight").shape() == Shape{1, 512, 1, 1});
        CHECK(g.params.at("neglect.3.weight").shape() == Shape{1, 512, 1, 1});
        CHECK(g.params.at("neglect.1.weight").shape() == Shape{1, 128, 1, 1});
    }

    TEST_CASE("initialization statistics and determinism")
    {
        auto c = small_config();
        auto a = build_generator(c, 11);
        auto b = build_generator(c, 11);
        auto other = build_generator(c, 12);
        REQUIRE(a.params.size() == b.params.size());
        for (size_t i = 0; i < a.params.size(); ++i) {
            CHECK(a.params.items()[i].first == b.params.items()[i].first);
            CHECK(bit_identical(a.params.items()[i].second, b.params.items()[i].second));
        }
        CHECK_FALSE(bit_identical(a.params.at("enc.1.weight"), other.params.at("enc.1.weight")));

        const auto& w = build_generator(NetConfig::full_scale(), 1).params.at("enc.4.weight");
        double s = 0, s2 = 0;
        for (Real v : w.data()) {
            s += v;
            s2 += double(v) * v;
        }
        const double n = static_cast<double>(w.numel());
        CHECK(std::abs(s / n) < 1e-3);
        CHECK(std::sqrt(s2 / n) == doctest::Approx(0.02).epsilon(0.01));
        for (Real v : a.params.at("enc.2.gamma").data()) CHECK(v == 1);
        for (Real v : a.params.at("fill.1.bias").data()) CHECK(v == 0);
    }

    TEST_CASE("invalid configurations are rejected")
    {
        auto c = small_config();
        c.image_h = 36;
        CHECK_THROWS_AS(build_generator(c, 1), ConfigError);
        c = small_config();
        c.depth = 0;
        CHECK_THROWS_AS(build_generator(c, 1), ConfigError);
    }

    TEST_CASE("encoder feature shapes")
    {
        NoGradGuard ng;
        NetConfig c = small_config(5, 32);
        auto g = build_generator(c, 1);
        auto feats = encoder_forward(g, random_image(c, 1, 2));
        REQUIRE(feats.size() == 5);
        CHECK(feats[4].dim(2) == 1);
        CHECK(feats[4].dim(3) == 1);
        CHECK(feats[0].dim(1) == c.width(1));

        NetConfig r = small_config(4);
        r.image_h = 64;
        r.image_w = 48;
        auto gr = build_generator(r, 1);
        auto fr = encoder_forward(gr, random_image(r, 1, 2));
        CHECK(fr[3].shape() == Shape{1, r.width(4), 4, 3});

        CHECK_THROWS_AS(encoder_forward(g, Tensor::zeros({1, 3, 16, 16})), DimensionError);
    }

    TEST_CASE("full-scale encoder reaches a 1x1 bottleneck")
    {
        NoGradGuard ng;
        auto c = NetConfig::full_scale();
        c.base_width = 4;  // keeps the pass cheap; spatial arithmetic is unchanged
        c.max_width = 32;
        auto g = build_generator(c, 1);
        auto feats = encoder_forward(g, random_image(c, 1, 3));
        CHECK(feats[6].shape() == Shape{1, 32, 1, 1});
    }

    TEST_CASE("output shapes, ranges and mask scales in both modes")
    {
        NoGradGuard ng;
        for (auto mode : {UpsampleMode::nn_conv, UpsampleMode::deconv}) {
            NetConfig c = small_config(5, 32);
            c.upsample_mode = mode;
            auto g = build_generator(c, 4);
            auto x = random_image(c, 2, 5);
            auto out = generator_forward(g, affine(x, 3, 0));  // out-of-range input still yields bounded outputs
            CHECK(out.z_p.shape() == Shape{2, 1, 32, 32});
            CHECK(out.y_p.shape() == Shape{2, 3, 32, 32});
            auto [zlo, zhi] = value_range(out.z_p);
            auto [ylo, yhi] = value_range(out.y_p);
            CHECK(zlo >= 0);
            CHECK(zhi <= 1);
            CHECK(ylo >= -1);
            CHECK(yhi <= 1);
            REQUIRE(out.neglect_masks.size() == 5);
            for (int i = 1; i <= 5; ++i) {
                const auto& m = out.neglect_masks[static_cast<size_t>(i - 1)];
                CHECK(m.shape() == Shape{2, 1, 32 >> i, 32 >> i});
                auto [lo, hi] = value_range(m);
                CHECK(lo > 0);
                CHECK(hi < 1);
            }
        }
    }

    TEST_CASE("dec-seg layer input widths")
    {
        NoGradGuard ng;
        auto c = small_config(4);
        auto g = build_generator(c, 1);
        auto feats = encoder_forward(g, random_image(c, 1, 1));
        auto seg = dec_seg_forward(g, feats);
        REQUIRE(seg.outputs.size() == 4);
        for (int i = 4; i >= 2; --i) {
            const int in = g.params.at("seg." + std::to_string(i) + ".weight").dim(0);
            const int expected = i == 4 ? c.width(4) : c.width(i) + seg.outputs[static_cast<size_t>(i)].dim(1);
            CHECK(in == expected);
            CHECK(seg.outputs[static_cast<size_t>(i - 1)].dim(1) == c.width(i - 1));
        }
    }

    TEST_CASE("forced neglect masks")
    {
        NoGradGuard ng;
        auto c = small_config(3, 16);
        auto g = build_generator(c, 2);
        auto feats = encoder_forward(g, random_image(c, 1, 3));
        auto seg = dec_seg_forward(g, feats);
        auto ones = neglect_node(g, 2, feats[1], seg.outputs[2], MaskOverride::ones);
        CHECK(bit_identical(ones.gated, feats[1]));
        auto zeros = neglect_node(g, 2, feats[1], seg.outputs[2], MaskOverride::zeros);
        for (Real v : zeros.gated.data()) CHECK(v == 0);
        auto learned = neglect_node(g, 3, feats[2], Tensor());
        CHECK(learned.mask.shape() == Shape{1, 1, 2, 2});
    }

    TEST_CASE("baseline mode has no segmentation outputs")
    {
        NoGradGuard ng;
        auto c = small_config();
        c.use_neglect_branch = false;
        auto g = build_generator(c, 1);
        for (const auto& [name, t] : g.params.items()) {
            CHECK(name.rfind("seg.", 0) != 0);
            CHECK(name.rfind("neglect.", 0) != 0);
        }
        auto out = generator_forward(g, random_image(c, 1, 1));
        CHECK_FALSE(out.z_p.defined());
        CHECK(out.neglect_masks.empty());
        CHECK(out.y_p.shape() == Shape{1, 3, 32, 32});
        CHECK_THROWS_AS(dec_seg_forward(g, encoder_forward(g, random_image(c, 1, 1))), ConfigError);
    }

    TEST_CASE("forcing masks to one reproduces the baseline dec-fill inputs")
    {
        NoGradGuard ng;
        for (auto mode : {UpsampleMode::nn_conv, UpsampleMode::deconv}) {
            auto c = small_config(4);
            c.upsample_mode = mode;
            auto full = build_generator(c, 9);
            auto base_cfg = c;
            base_cfg.use_neglect_branch = false;
            GeneratorParams base{base_cfg, {}};
            for (const auto& [name, t] : full.params.items())
                if (name.rfind("seg.", 0) != 0 && name.rfind("neglect.", 0) != 0) base.params.add(name, t);

            auto x = random_image(c, 2, 4);
            auto forced = generator_forward(full, x, {MaskOverride::ones});
            auto plain = generator_forward(base, x);
            REQUIRE(forced.fill_inputs.size() == plain.fill_inputs.size());
            for (size_t i = 0; i < forced.fill_inputs.size(); ++i)
                CHECK(bit_identical(forced.fill_inputs[i], plain.fill_inputs[i]));
            CHECK(bit_identical(forced.y_p, plain.y_p));

            auto learned = generator_forward(full, x);
            CHECK_FALSE(bit_identical(learned.fill_inputs[0], plain.fill_inputs[0]));
        }
    }

    TEST_CASE("forward passes are deterministic")
    {
        auto c = small_config();
        auto g = build_generator(c, 6);
        auto x = random_image(c, 2, 7);
        auto a = generator_forward(g, x);
        auto b = generator_forward(g, x);
        CHECK(bit_identical(a.y_p, b.y_p));
        CHECK(bit_identical(a.z_p, b.z_p));
    }
}

TEST_SUITE("discriminator")
{
    TEST_CASE("128x128 input at depth 5 gives a 4x4 patch grid")
    {
        NoGradGuard ng;
        auto c = NetConfig::full_scale();
        c.base_width = 4;
        c.max_width = 16;
        auto d = build_discriminator(c, 1);
        CHECK(d.params.at("disc.1.weight").shape() == Shape{4, 6, 4, 4});
        auto x = random_image(c, 1, 1);
        auto out = discriminator_forward(d, x, random_image(c, 1, 2));
        CHECK(out.patches.shape() == Shape{1, 1, 4, 4});
        double s = 0;
        for (Real v : out.patches.data()) s += v;
        CHECK(out.score[0] == doctest::Approx(s / 16).epsilon(1e-6));
    }

    TEST_CASE("full-scale stage widths")
    {
        auto d = build_discriminator(NetConfig::full_scale(), 1);
        const std::vector<int> widths{64, 128, 256, 512, 512};
        for (int i = 1; i <= 5; ++i)
            CHECK(d.params.at("disc." + std::to_string(i) + ".weight").dim(0) == widths[static_cast<size_t>(i - 1)]);
        CHECK(d.params.at("disc.head.weight").shape() == Shape{1, 512, 1, 1});
        CHECK_FALSE(d.params.contains("disc.6.weight"));
    }

    TEST_CASE("single patch at depth 5 on 32x32")
    {
        NoGradGuard ng;
        auto c = small_config(5, 32);
        c.disc_depth = 5;
        auto d = build_discriminator(c, 1);
        auto out = discriminator_forward(d, random_image(c, 2, 1), random_image(c, 2, 2));
        CHECK(out.patches.shape() == Shape{2, 1, 1, 1});
        CHECK(out.score[0] == out.patches[0]);
        CHECK(out.score[1] == out.patches[1]);
    }

    TEST_CASE("zeroed head scores exactly one half")
    {
        NoGradGuard ng;
        auto c = small_config();
        auto d = build_discriminator(c, 1);
        for (auto& v : d.params.at("disc.head.weight").mutable_data()) v = 0;
        auto out = discriminator_forward(d, random_image(c, 3, 1), random_image(c, 3, 2));
        for (Real v : out.patches.data()) CHECK(v == Real(0.5));
        for (Real v : out.score.data()) CHECK(v == Real(0.5));
    }

    TEST_CASE("score stays inside the open unit interval")
    {
        NoGradGuard ng;
        auto c = small_config();
        auto d = build_discriminator(c, 3);
        for (double scale : {1.0, 50.0}) {
            auto out = discriminator_forward(d, affine(random_image(c, 2, 1), static_cast<Real>(scale), 0),
                                             random_image(c, 2, 2));
            for (Real v : out.score.data()) {
                CHECK(v > 0);
                CHECK(v < 1);
            }
        }
    }

    TEST_CASE("shape errors")
    {
        NoGradGuard ng;
        auto c = small_config();
        auto d = build_discriminator(c, 1);
        CHECK_THROWS_AS(discriminator_forward(d, Tensor::zeros({1, 3, 36, 36}), Tensor::zeros({1, 3, 36, 36})),
                        ConfigError);
        CHECK_THROWS_AS(discriminator_forward(d, Tensor::zeros({1, 3, 32, 32}), Tensor::zeros({1, 3, 16, 16})),
                        DimensionError);
    }
}
