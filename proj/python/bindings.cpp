#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neglectnet/checkpoint.hpp"
#include "neglectnet/metrics.hpp"
#include "neglectnet/ops.hpp"
#include "neglectnet/training.hpp"

namespace py = pybind11;
using namespace neglectnet;

namespace {

using Array = py::array_t<Real, py::array::c_style | py::array::forcecast>;

Array to_array(const Tensor& t)
{
    Array out(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
    const auto src = t.data();
    std::copy(src.begin(), src.end(), out.mutable_data());
    return out;
}

Tensor to_tensor(const Array& a)
{
    Shape shape(a.shape(), a.shape() + a.ndim());
    return Tensor::from_data(shape, std::vector<Real>(a.data(), a.data() + a.size()));
}

Array image_array(const Image& im)
{
    Array out({im.channels, im.height, im.width});
    std::copy(im.data.begin(), im.data.end(), out.mutable_data());
    return out;
}

Image array_image(const Array& a)
{
    if (a.ndim() != 3) throw ArgumentError("expected a C x H x W array");
    Image im(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
    std::copy(a.data(), a.data() + a.size(), im.data.begin());
    return im;
}

// N x C x H x W array -> N images
std::vector<Image> array_images(const Array& a)
{
    if (a.ndim() != 4) throw ArgumentError("expected an N x C x H x W array");
    std::vector<Image> out;
    const auto per = static_cast<size_t>(a.shape(1) * a.shape(2) * a.shape(3));
    for (py::ssize_t n = 0; n < a.shape(0); ++n) {
        Image im(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)), static_cast<int>(a.shape(3)));
        std::copy(a.data() + n * per, a.data() + (n + 1) * per, im.data.begin());
        out.push_back(std::move(im));
    }
    return out;
}

Array stack(const std::vector<Image>& images)
{
    if (images.empty()) return Array(std::vector<py::ssize_t>{0});
    const auto& f = images.front();
    Array out({static_cast<py::ssize_t>(images.size()), py::ssize_t(f.channels), py::ssize_t(f.height),
               py::ssize_t(f.width)});
    Real* dst = out.mutable_data();
    for (const auto& im : images) dst = std::copy(im.data.begin(), im.data.end(), dst);
    return out;
}

py::dict sample_dict(const std::vector<Sample>& samples)
{
    std::vector<Image> x, y, z;
    for (const auto& s : samples) {
        x.push_back(s.x);
        y.push_back(s.y);
        z.push_back(s.z);
    }
    py::dict d;
    d["x"] = stack(x);
    d["y"] = stack(y);
    d["z"] = stack(z);
    return d;
}

std::vector<Sample> dict_samples(const Array& x, const Array& y, const Array& z)
{
    const auto xs = array_images(x), ys = array_images(y), zs = array_images(z);
    if (xs.size() != ys.size() || xs.size() != zs.size()) throw ArgumentError("x, y and z differ in sample count");
    std::vector<Sample> out;
    for (size_t i = 0; i < xs.size(); ++i) out.push_back({xs[i], ys[i], zs[i]});
    return out;
}

NetConfig net_config(int depth, int base_width, int max_width, int image_size, const std::string& mode,
                     const std::string& upsample_mode, int disc_depth)
{
    NetConfig c;
    c.depth = depth;
    c.base_width = base_width;
    c.max_width = max_width;
    c.image_h = c.image_w = image_size;
    if (mode != "full" && mode != "baseline") throw ConfigError("mode must be full or baseline");
    c.use_neglect_branch = mode == "full";
    c.upsample_mode = parse_upsample_mode(upsample_mode);
    c.disc_depth = disc_depth;
    c.validate();
    return c;
}

#define NET_ARGS                                                                                          \
    py::arg("depth") = 4, py::arg("base_width") = 8, py::arg("max_width") = 512, py::arg("image_size") = 32, \
        py::arg("mode") = "full", py::arg("upsample_mode") = "nn_conv", py::arg("disc_depth") = 3

py::dict generator_outputs(const GeneratorOutput& out)
{
    py::dict d;
    d["y_p"] = to_array(out.y_p);
    d["z_p"] = out.z_p.defined() ? py::object(to_array(out.z_p)) : py::none();
    py::list masks;
    for (const auto& m : out.neglect_masks) masks.append(to_array(m));
    d["neglect_masks"] = masks;
    return d;
}

py::dict record_dict(const StepRecord& r)
{
    py::dict d;
    d["step"] = r.step;
    d["l_g"] = r.l_g;
    d["l_adv"] = r.l_adv;
    d["l1_y"] = r.l1_y;
    d["l1_z"] = r.l1_z;
    d["l_d"] = r.l_d;
    d["d_real"] = r.d_real;
    d["d_fake"] = r.d_fake;
    return d;
}

py::dict eval_dict(const EvalResult& r)
{
    py::dict d;
    d["l1_pct"] = r.l1_pct;
    d["psnr_db"] = r.psnr_db;
    d["ssim"] = r.ssim;
    d["mask_iou"] = r.has_mask() ? py::object(py::float_(r.mask_iou)) : py::none();
    d["n"] = r.n_samples;
    return d;
}

class Trainer {
public:
    Trainer(const NetConfig& net, int batch_size, double lr, uint64_t seed, bool augment)
    {
        config_.net = net;
        config_.batch_size = batch_size;
        config_.lr = lr;
        config_.seed = seed;
        config_.augment = augment;
        config_.steps = 0;
        config_.validate();
        state_ = init_training(config_);
    }

    py::list train(const Array& x, const Array& y, const Array& z, int64_t steps)
    {
        const auto data = dict_samples(x, y, z);
        config_.steps = state_.step + steps;
        TrainReport report;
        {
            py::gil_scoped_release release;
            report = neglectnet::train(state_, config_, data);
        }
        py::list out;
        for (const auto& r : report.records) out.append(record_dict(r));
        return out;
    }

    py::dict forward(const Array& x) const
    {
        NoGradGuard no_grad;
        return generator_outputs(generator_forward(state_.g, to_tensor(x)));
    }

    py::dict evaluate(const Array& x, const Array& y, const Array& z) const
    {
        return eval_dict(neglectnet::evaluate(state_.g, dict_samples(x, y, z)));
    }

    void save(const std::string& path) const { save_checkpoint(path, state_); }
    void load(const std::string& path) { load_checkpoint(path, state_); }
    int64_t step() const { return state_.step; }

    std::vector<std::string> parameter_names() const
    {
        std::vector<std::string> names;
        for (const auto& [name, t] : state_.g.params.items()) names.push_back(name);
        return names;
    }

private:
    TrainConfig config_;
    TrainState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Joint foreground segmentation and background inpainting GAN with neglect nodes.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "synth",
        [](int64_t n, uint64_t seed, int image_size) {
            SynthConfig c;
            c.height = c.width = image_size;
            return sample_dict(synth_samples(c, seed, n));
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("image_size") = 32,
        "Procedural samples as a dict of float arrays: x, y (N x 3 x H x W, [-1, 1]) and z (N x 1 x H x W, [0, 1]).");

    m.def(
        "make_dataset",
        [](const std::string& root, const std::string& split, int64_t n, uint64_t seed, int image_size) {
            SynthConfig c;
            c.height = c.width = image_size;
            make_dataset(c, seed, n, root, split);
        },
        py::arg("root"), py::arg("split"), py::arg("n"), py::arg("seed") = 1, py::arg("image_size") = 32);

    m.def(
        "load_dataset",
        [](const std::string& root, const std::string& split) { return sample_dict(load_dataset(root, split)); },
        py::arg("root"), py::arg("split"));

    m.def(
        "generator_forward",
        [](const Array& x, uint64_t seed, int depth, int base_width, int max_width, int image_size,
           const std::string& mode, const std::string& upsample_mode, int disc_depth) {
            const auto g = build_generator(
                net_config(depth, base_width, max_width, image_size, mode, upsample_mode, disc_depth), seed);
            NoGradGuard no_grad;
            return generator_outputs(generator_forward(g, to_tensor(x)));
        },
        py::arg("x"), py::arg("seed") = 1, NET_ARGS, "Forward pass of a freshly initialized generator.");

    m.def(
        "discriminator_forward",
        [](const Array& x, const Array& y, uint64_t seed, int depth, int base_width, int max_width, int image_size,
           const std::string& mode, const std::string& upsample_mode, int disc_depth) {
            const auto d = build_discriminator(
                net_config(depth, base_width, max_width, image_size, mode, upsample_mode, disc_depth), seed);
            NoGradGuard no_grad;
            const auto out = discriminator_forward(d, to_tensor(x), to_tensor(y));
            return py::make_tuple(to_array(out.patches), to_array(out.score));
        },
        py::arg("x"), py::arg("y"), py::arg("seed") = 1, NET_ARGS, "Patch grid and per-sample score.");

    m.def(
        "discriminator_loss",
        [](const Array& d_real, const Array& d_fake) {
            return static_cast<double>(discriminator_loss(to_tensor(d_real), to_tensor(d_fake)).item());
        },
        py::arg("d_real"), py::arg("d_fake"));

    m.def(
        "adversarial_loss",
        [](const Array& d_fake) { return static_cast<double>(mean(neg(neglectnet::log(to_tensor(d_fake)))).item()); },
        py::arg("d_fake"), "Non-saturating generator term, batch mean of -log d_fake.");

    m.def(
        "l1_pct", [](const Array& a, const Array& b, double range) { return l1_pct(array_image(a), array_image(b), range); },
        py::arg("a"), py::arg("b"), py::arg("value_range") = 1.0);
    m.def(
        "psnr", [](const Array& a, const Array& b, double max_val) { return psnr(array_image(a), array_image(b), max_val); },
        py::arg("a"), py::arg("b"), py::arg("max_val") = 1.0);
    m.def(
        "ssim",
        [](const Array& a, const Array& b, double range) { return ssim(array_image(a), array_image(b), range); },
        py::arg("a"), py::arg("b"), py::arg("data_range") = 1.0);
    m.def(
        "mask_iou", [](const Array& p, const Array& t) { return mask_iou(array_images(p), array_images(t)); },
        py::arg("predicted"), py::arg("truth"));

    py::class_<Trainer>(m, "Trainer")
        .def(py::init([](int batch_size, double lr, uint64_t seed, bool augment, int depth, int base_width,
                         int max_width, int image_size, const std::string& mode, const std::string& upsample_mode,
                         int disc_depth) {
                 return Trainer(net_config(depth, base_width, max_width, image_size, mode, upsample_mode, disc_depth),
                                batch_size, lr, seed, augment);
             }),
             py::arg("batch_size") = 8, py::arg("lr") = 1e-4, py::arg("seed") = 1, py::arg("augment") = false,
             NET_ARGS)
        .def("train", &Trainer::train, py::arg("x"), py::arg("y"), py::arg("z"), py::arg("steps"),
             "Runs `steps` more alternating updates; returns one dict per step.")
        .def("forward", &Trainer::forward, py::arg("x"))
        .def("evaluate", &Trainer::evaluate, py::arg("x"), py::arg("y"), py::arg("z"))
        .def("save", &Trainer::save, py::arg("path"))
        .def("load", &Trainer::load, py::arg("path"))
        .def_property_readonly("step", &Trainer::step)
        .def_property_readonly("parameter_names", &Trainer::parameter_names);
}
