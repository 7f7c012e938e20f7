#include "moonlab/engine.hpp"

#include <algorithm>
#include <string>

#include "moonlab/errors.hpp"
#include "moonlab/parallel.hpp"

namespace moonlab {

void validate(const ArchitectureSpec& arch) {
    if (arch.n_components < 1 || arch.n_components > kMaxComponents) {
        throw ValidationError("n", "must satisfy 1 <= n <= " + std::to_string(kMaxComponents));
    }
    if (arch.m_required < 1 || arch.m_required > arch.n_components) {
        throw ValidationError("m", "must satisfy 1 <= m <= n (n = " + std::to_string(arch.n_components) + ")");
    }
}

void validate(const ScenarioConfig& cfg) {
    validate(cfg.arch);
    validate(cfg.dep);
    validate(cfg.dist);
    if (cfg.nb < 1) throw ValidationError("samples", "must be at least 1");
}

double system_ttf(std::span<const double> y, const ArchitectureSpec& arch) {
    if (y.size() != static_cast<std::size_t>(arch.n_components)) {
        throw DimensionError("system_ttf: expected " + std::to_string(arch.n_components) + " lifetimes, got " +
                             std::to_string(y.size()));
    }
    if (arch.m_required < 1 || arch.m_required > arch.n_components) {
        throw ValidationError("m", "must satisfy 1 <= m <= n");
    }
    return kernels::select_rank(y, static_cast<std::size_t>(arch.n_components - arch.m_required));
}

namespace {

constexpr std::size_t kBlockSamples = 512;

// Samples [first, first + out.size()) must all come from one stream.
void simulate_block_run(const ScenarioConfig& cfg, const kernels::KernelSet& ks, const kernels::CombineParams& params,
                        std::uint64_t first, std::span<double> out, std::vector<double>& raw,
                        std::vector<double>& lifetimes) {
    const std::size_t n = params.n;
    const std::size_t budget = draws_per_sample(cfg.dep.model, n);
    const std::uint64_t stream_id = first / kSamplesPerStream;
    std::uint64_t local = first % kSamplesPerStream;

    for (std::size_t done = 0; done < out.size();) {
        const std::size_t len = std::min(kBlockSamples, out.size() - done);
        ks.fill_uniforms(cfg.seed, stream_id, local * budget, raw.data(), len * budget);

        double* life = raw.data();
        if (cfg.dep.model != DependencyModel::Linear) {
            life = lifetimes.data();
            for (std::size_t i = 0; i < len; ++i) {
                std::copy_n(raw.data() + i * budget, n + 1, life + i * (n + 1));
            }
        }
        ks.weibull_transform(life, len * (n + 1), cfg.dist.shape, cfg.dist.scale);
        ks.combine_select(life, raw.data(), budget, len, params, out.data() + done);

        done += len;
        local += len;
    }
}

}  // namespace

void simulate_range(const ScenarioConfig& cfg, std::uint64_t first, std::span<double> out,
                    const EngineOptions& options) {
    validate(cfg);
    const kernels::KernelSet& ks = options.kernels != nullptr ? *options.kernels : kernels::active_kernels();
    const auto n = static_cast<std::size_t>(cfg.arch.n_components);
    const auto m = static_cast<std::size_t>(cfg.arch.m_required);
    const kernels::CombineParams params{cfg.dep.model, n, options.invert_m_canary ? m - 1 : n - m, cfg.dep.p};

    const std::size_t budget = draws_per_sample(cfg.dep.model, n);
    std::vector<double> raw(kBlockSamples * budget);
    std::vector<double> lifetimes(kBlockSamples * (n + 1));

    std::size_t done = 0;
    while (done < out.size()) {
        const std::uint64_t index = first + done;
        const std::uint64_t stream_end = (index / kSamplesPerStream + 1) * kSamplesPerStream;
        const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(stream_end - index, out.size() - done));
        simulate_block_run(cfg, ks, params, index, out.subspan(done, len), raw, lifetimes);
        done += len;
    }
}

TTFSample simulate_batch(const ScenarioConfig& cfg, const EngineOptions& options) {
    validate(cfg);
    if (cfg.nb > options.max_materialized) {
        throw ResourceLimitError("simulate_batch: " + std::to_string(cfg.nb) +
                                     " samples exceed the in-memory sample cap",
                                 options.max_materialized);
    }
    TTFSample sample;
    sample.scenario = cfg;
    sample.values.resize(cfg.nb);

    const std::uint64_t chunks = (cfg.nb + kSamplesPerStream - 1) / kSamplesPerStream;
    std::span<double> all(sample.values);
    parallel_for(chunks, resolve_threads(options.threads), [&](std::size_t c) {
        const std::uint64_t begin = c * kSamplesPerStream;
        const std::uint64_t len = std::min(kSamplesPerStream, cfg.nb - begin);
        simulate_range(cfg, begin, all.subspan(begin, len), options);
    });
    return sample;
}

double reference_sample(const ScenarioConfig& cfg, std::uint64_t index) {
    const auto n = static_cast<std::size_t>(cfg.arch.n_components);
    RandomStream stream(cfg.seed, index / kSamplesPerStream,
                        (index % kSamplesPerStream) * draws_per_sample(cfg.dep.model, n));
    const ComponentTTFVector y = draw_ttf_vector(cfg.dep, cfg.dist, n, stream);
    return system_ttf(y, cfg.arch);
}

}  // namespace moonlab
