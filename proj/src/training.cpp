#include "neglectnet/training.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "neglectnet/ops.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

void require_finite(const Tensor& t, const char* what)
{
    for (Real v : t.data())
        if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
}

double mean_of(const Tensor& t)
{
    double s = 0;
    for (Real v : t.data()) s += v;
    return s / static_cast<double>(t.numel());
}

}  // namespace

void LossWeights::validate() const
{
    if (!(lambda_f >= 0) || !(lambda_s >= 0)) throw ConfigError("loss weights must be >= 0");
}

GeneratorLoss generator_loss(const Tensor& d_fake, const Tensor& y_p, const Tensor& y_g, const Tensor& z_p,
                             const Tensor& z_g, const LossWeights& w)
{
    GeneratorLoss loss;
    loss.adversarial = mean(neg(log(d_fake)));
    loss.l1_y = l1_distance(y_p, y_g);
    loss.total = add(loss.adversarial, affine(loss.l1_y, w.lambda_f, 0));
    if (z_p.defined()) {
        if (!z_g.defined()) throw ArgumentError("mask prediction given without a mask target");
        loss.l1_z = l1_distance(z_p, z_g);
        loss.total = add(loss.total, affine(loss.l1_z, w.lambda_s, 0));
    }
    require_finite(loss.total, "generator loss");
    return loss;
}

Tensor discriminator_loss(const Tensor& d_real, const Tensor& d_fake)
{
    if (d_real.shape() != d_fake.shape()) throw DimensionError("real and fake scores differ in shape");
    Tensor loss = mean(neg(add(log(d_real), log(affine(d_fake, -1, 1)))));
    require_finite(loss, "discriminator loss");
    return loss;
}

AdamState make_adam(const ParamStore& params, double beta1, double beta2, double eps)
{
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && eps > 0))
        throw ConfigError("Adam needs 0 <= beta < 1 and eps > 0");
    AdamState s{beta1, beta2, eps, 0, {}, {}};
    for (const auto& [name, t] : params.items()) {
        s.m.emplace_back(static_cast<size_t>(t.numel()), Real(0));
        s.v.emplace_back(static_cast<size_t>(t.numel()), Real(0));
    }
    return s;
}

void adam_step(AdamState& state, ParamStore& params, double lr)
{
    const auto& items = params.items();
    if (state.m.size() != items.size() || state.v.size() != items.size())
        throw DimensionError("optimizer state does not match the parameter store");
    for (size_t i = 0; i < items.size(); ++i) {
        const Tensor& t = items[i].second;
        if (state.m[i].size() != static_cast<size_t>(t.numel()) || state.v[i].size() != state.m[i].size())
            throw DimensionError("optimizer buffers for " + items[i].first + " have the wrong size");
        for (Real g : t.grad())
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in " + items[i].first);
    }

    ++state.step;
    const double bc1 = 1 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < items.size(); ++i) {
        Tensor t = items[i].second;
        auto p = t.mutable_data();
        const auto grad = t.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (size_t k = 0; k < p.size(); ++k) {
            const double g = grad.empty() ? 0.0 : static_cast<double>(grad[k]);
            const double mk = state.beta1 * m[k] + (1 - state.beta1) * g;
            const double vk = state.beta2 * v[k] + (1 - state.beta2) * g * g;
            m[k] = static_cast<Real>(mk);
            v[k] = static_cast<Real>(vk);
            p[k] = static_cast<Real>(p[k] - lr * (mk / bc1) / (std::sqrt(vk / bc2) + state.eps));
        }
    }
}

void TrainConfig::validate() const
{
    net.validate();
    weights.validate();
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(lr > 0)) throw ConfigError("lr must be > 0");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

TrainState init_training(const TrainConfig& config)
{
    config.validate();
    TrainState s;
    s.g = build_generator(config.net, derive_seed(config.seed, 1));
    s.d = build_discriminator(config.net, derive_seed(config.seed, 2));
    s.adam_g = make_adam(s.g.params, config.beta1, config.beta2, config.adam_eps);
    s.adam_d = make_adam(s.d.params, config.beta1, config.beta2, config.adam_eps);
    return s;
}

const char* TrainReport::csv_header() { return "step,l_g,l_adv,l1_y,l1_z,l_d,d_real,d_fake"; }

std::string TrainReport::csv_row(const StepRecord& r)
{
    std::ostringstream out;
    out << std::setprecision(9) << r.step << ',' << r.l_g << ',' << r.l_adv << ',' << r.l1_y << ',' << r.l1_z << ','
        << r.l_d << ',' << r.d_real << ',' << r.d_fake;
    return out.str();
}

void TrainReport::write_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << csv_header() << '\n';
    for (const auto& r : records) out << csv_row(r) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

std::vector<int64_t> batch_indices(uint64_t seed, int64_t dataset_size, int batch_size, int64_t step)
{
    if (dataset_size < 1) throw ArgumentError("empty dataset");
    if (batch_size < 1 || batch_size > dataset_size) throw ArgumentError("batch size must be in [1, dataset size]");
    const uint64_t order_seed = derive_seed(seed, 3);
    std::vector<int64_t> perm;
    int64_t perm_epoch = -1;
    std::vector<int64_t> out;
    for (int64_t k = 0; k < batch_size; ++k) {
        const int64_t pos = step * batch_size + k;
        const int64_t epoch = pos / dataset_size;
        if (epoch != perm_epoch) {
            perm.resize(static_cast<size_t>(dataset_size));
            std::iota(perm.begin(), perm.end(), 0);
            Rng rng(derive_seed(order_seed, static_cast<uint64_t>(epoch)));
            for (int64_t i = dataset_size - 1; i > 0; --i)
                std::swap(perm[static_cast<size_t>(i)], perm[rng.uniform_int(static_cast<uint64_t>(i + 1))]);
            perm_epoch = epoch;
        }
        out.push_back(perm[static_cast<size_t>(pos % dataset_size)]);
    }
    return out;
}

StepRecord train_step(TrainState& state, const TrainConfig& config, const Batch& batch)
{
    auto& g = state.g;
    auto& d = state.d;
    g.params.zero_grad();
    d.params.zero_grad();
    d.params.set_requires_grad(true);

    const GeneratorOutput out = generator_forward(g, batch.x);

    StepRecord rec;
    rec.lr_g = config.lr;
    rec.lr_d = config.lr / 2;

    const Tensor d_real = discriminator_forward(d, batch.x, batch.y).score;
    const Tensor d_fake = discriminator_forward(d, batch.x, out.y_p.detach()).score;
    const Tensor l_d = discriminator_loss(d_real, d_fake);
    l_d.backward();
    if (g.params.any_grad()) throw std::logic_error("discriminator update reached generator parameters");
    adam_step(state.adam_d, d.params, rec.lr_d);
    rec.l_d = l_d.item();
    rec.d_real = mean_of(d_real);
    rec.d_fake = mean_of(d_fake);

    d.params.zero_grad();
    d.params.set_requires_grad(false);
    const Tensor d_judged = discriminator_forward(d, batch.x, out.y_p).score;
    const Tensor z_g = out.z_p.defined() ? batch.z : Tensor();
    const GeneratorLoss loss = generator_loss(d_judged, out.y_p, batch.y, out.z_p, z_g, config.weights);
    loss.total.backward();
    d.params.set_requires_grad(true);
    if (d.params.any_grad()) throw std::logic_error("generator update reached discriminator parameters");
    adam_step(state.adam_g, g.params, rec.lr_g);
    g.params.zero_grad();

    rec.l_g = loss.total.item();
    rec.l_adv = loss.adversarial.item();
    rec.l1_y = loss.l1_y.item();
    rec.l1_z = loss.l1_z.defined() ? loss.l1_z.item() : 0.0;
    return rec;
}

TrainReport train(TrainState& state, const TrainConfig& config, const std::vector<Sample>& dataset,
                  const TrainHooks& hooks)
{
    config.validate();
    const auto n = static_cast<int64_t>(dataset.size());
    if (n == 0) throw ArgumentError("training needs a non-empty dataset");
    if (config.batch_size > n) throw ArgumentError("batch size exceeds the dataset size");

    TrainReport report;
    const uint64_t augment_seed = derive_seed(config.seed, 4);
    while (state.step < config.steps) {
        const int64_t s = state.step;
        std::vector<Sample> picked;
        const auto idx = batch_indices(config.seed, n, config.batch_size, s);
        for (size_t k = 0; k < idx.size(); ++k) {
            const Sample& src = dataset[static_cast<size_t>(idx[k])];
            if (config.augment) {
                Rng rng(derive_seed(augment_seed, static_cast<uint64_t>(s * config.batch_size) + k));
                picked.push_back(augment(src, config.augment_config, rng));
            } else {
                picked.push_back(src);
            }
        }
        StepRecord rec = train_step(state, config, make_batch(picked));
        state.step = s + 1;
        rec.step = state.step;
        report.records.push_back(rec);
        if (hooks.on_step) hooks.on_step(rec);
        if (hooks.on_checkpoint && config.checkpoint_every > 0 && state.step % config.checkpoint_every == 0)
            hooks.on_checkpoint(state);
    }
    return report;
}

}  // namespace neglectnet
