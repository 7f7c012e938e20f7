#include <gtest/gtest.h>

#include <cstring>
#include <vector>

#include "moonlab/dependency.hpp"
#include "moonlab/engine.hpp"
#include "moonlab/errors.hpp"
#include "moonlab/kernels.hpp"

using namespace moonlab;
using kernels::Isa;

namespace {

bool has_avx2() {
    for (const Isa isa : kernels::available_isas()) {
        if (isa == Isa::Avx2) return true;
    }
    return false;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> run(const kernels::KernelSet& ks, const ScenarioConfig& cfg, std::uint64_t first, std::size_t count) {
    std::vector<double> out(count);
    EngineOptions opts;
    opts.threads = 1;
    opts.kernels = &ks;
    simulate_range(cfg, first, out, opts);
    return out;
}

}  // namespace

TEST(Kernels, ScalarAlwaysAvailableFirst) {
    const auto isas = kernels::available_isas();
    ASSERT_FALSE(isas.empty());
    EXPECT_EQ(isas.front(), Isa::Scalar);
    EXPECT_EQ(kernels::kernels_for(Isa::Scalar).isa, Isa::Scalar);
    EXPECT_EQ(kernels::to_string(Isa::Avx2), "avx2");
}

TEST(Kernels, UnavailableIsaThrows) {
    if (has_avx2()) GTEST_SKIP() << "host supports avx2";
    EXPECT_THROW(kernels::kernels_for(Isa::Avx2), UnsupportedError);
}

TEST(Kernels, SelectRank) {
    const double y[] = {3, 1, 2};
    EXPECT_EQ(kernels::select_rank(y, 0), 1);
    EXPECT_EQ(kernels::select_rank(y, 1), 2);
    EXPECT_EQ(kernels::select_rank(y, 2), 3);
}

TEST(Kernels, FillUniformsMatchesStream) {
    const auto& ks = kernels::scalar_kernels();
    std::vector<double> out(37);
    ks.fill_uniforms(99, 4, 5, out.data(), out.size());
    RandomStream s(99, 4, 5);
    for (const double u : out) EXPECT_EQ(u, sample_uniform(s));
}

TEST(Kernels, Avx2UniformsBitExact) {
    if (!has_avx2()) GTEST_SKIP() << "no avx2";
    const auto& a = kernels::scalar_kernels();
    const auto& b = kernels::kernels_for(Isa::Avx2);
    for (const std::uint64_t first : {0u, 1u, 3u, 8u, 1001u}) {
        for (const std::size_t count : {1u, 2u, 7u, 8u, 9u, 64u, 333u}) {
            std::vector<double> x(count), y(count);
            a.fill_uniforms(0xdeadbeefcafef00dULL, 12345, first, x.data(), count);
            b.fill_uniforms(0xdeadbeefcafef00dULL, 12345, first, y.data(), count);
            ASSERT_TRUE(bit_equal(x, y)) << first << " " << count;
        }
    }
}

TEST(Kernels, Avx2TransformBitExact) {
    if (!has_avx2()) GTEST_SKIP() << "no avx2";
    std::vector<double> base(4099);
    kernels::scalar_kernels().fill_uniforms(3, 0, 0, base.data(), base.size());
    base[0] = 0.0;
    base[1] = 1.0 - 0x1p-52;
    // Off the 2^-52 grid, where 1 - u rounds.
    for (std::size_t i = 2; i < 40; ++i) base[i] = 1.0 / (3.0 + static_cast<double>(i) * 1e5);
    base[40] = 1e-300;
    for (const double shape : {1.0, 0.5, 2.0, 3.7}) {
        for (const double scale : {1.0, 0.25, 1e3}) {
            auto x = base;
            auto y = base;
            kernels::scalar_kernels().weibull_transform(x.data(), x.size(), shape, scale);
            kernels::kernels_for(Isa::Avx2).weibull_transform(y.data(), y.size(), shape, scale);
            ASSERT_TRUE(bit_equal(x, y)) << shape << " " << scale;
        }
    }
}

TEST(Kernels, Avx2EngineBitExact) {
    if (!has_avx2()) GTEST_SKIP() << "no avx2";
    const auto& a = kernels::scalar_kernels();
    const auto& b = kernels::kernels_for(Isa::Avx2);
    for (const auto model : {DependencyModel::Linear, DependencyModel::GlobalCCF, DependencyModel::MarginalCCF}) {
        for (const int n : {1, 2, 3, 5}) {
            for (int m = 1; m <= n; ++m) {
                for (const double p : {0.0, 0.3, 1.0}) {
                    ScenarioConfig cfg;
                    cfg.arch = {n, m};
                    cfg.dep = {model, p};
                    cfg.dist = {1.3, 2.0};
                    cfg.seed = 77;
                    ASSERT_TRUE(bit_equal(run(a, cfg, 65530, 1203), run(b, cfg, 65530, 1203)))
                        << to_string(model) << " n=" << n << " m=" << m << " p=" << p;
                }
            }
        }
    }
}

TEST(Kernels, EngineMatchesReferencePath) {
    for (const Isa isa : kernels::available_isas()) {
        const auto& ks = kernels::kernels_for(isa);
        for (const auto model : {DependencyModel::Linear, DependencyModel::GlobalCCF, DependencyModel::MarginalCCF}) {
            for (const int n : {3, 4}) {
                for (int m = 1; m <= n; ++m) {
                    for (const double shape : {1.0, 0.7}) {
                        ScenarioConfig cfg;
                        cfg.arch = {n, m};
                        cfg.dep = {model, 0.45};
                        cfg.dist = {shape, 1.5};
                        cfg.seed = 5;
                        const std::uint64_t first = 2 * kSamplesPerStream - 100;
                        const auto got = run(ks, cfg, first, 300);
                        for (std::size_t i = 0; i < got.size(); ++i) {
                            ASSERT_EQ(got[i], reference_sample(cfg, first + i))
                                << kernels::to_string(isa) << " " << to_string(model) << " n=" << n << " m=" << m
                                << " i=" << i;
                        }
                    }
                }
            }
        }
    }
}
