#include "ordsim/checkpoint.hpp"

#include <fstream>
#include <string>

#include "ordsim/errors.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

namespace {

const char* activation_name(Activation a) {
    return a == Activation::relu ? "relu" : "identity";
}

Activation activation_from(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    throw DataError("checkpoint: unknown activation '" + std::string(name) + "'");
}

std::vector<std::string_view> next_fields(std::ifstream& in, std::string& buf,
                                          std::string_view key) {
    if (!std::getline(in, buf))
        throw DataError("checkpoint: missing '" + std::string(key) + "' line");
    auto fields = split_whitespace(buf);
    if (fields.empty() || fields[0] != key)
        throw DataError("checkpoint: expected '" + std::string(key) +
                        "' line, got '" + buf + "'");
    return fields;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    AtomicFile out(path);
    out.write("ordsim-checkpoint v1\n");
    out.write("seed " + std::to_string(ckpt.seed) + "\n");
    out.write("best_val_loss " + format_double(ckpt.best_val_loss) + "\n");
    out.write("input_dim " + std::to_string(ckpt.params.input_dim) + "\n");
    out.write("layers " + std::to_string(ckpt.params.specs.size()) + "\n");
    for (const auto& spec : ckpt.params.specs) {
        out.write("layer " + std::to_string(spec.input_dim) + " " +
                  std::to_string(spec.output_dim) + " " +
                  activation_name(spec.activation) + " " +
                  format_double(spec.dropout) + "\n");
    }
    const auto& head = ckpt.params.head;
    out.write(std::string("head ") +
              (head.kind == HeadKind::coral ? "coral" : "scalar-linear") + " " +
              (head.kind == HeadKind::coral || head.bias ? "bias" : "nobias") +
              " " + std::to_string(ckpt.params.output_dim()) + "\n");
    out.write("k " + std::to_string(ckpt.scheme.bucket_count()) + "\n");
    out.write("boundaries");
    for (const double b : ckpt.scheme.boundaries())
        out.write(" " + format_double(b));
    out.write("\nmidpoints");
    for (const double m : ckpt.scheme.midpoints())
        out.write(" " + format_double(m));
    out.write("\n");

    const auto flat = flatten_params(ckpt.params);
    out.write("params " + std::to_string(flat.size()) + "\n");
    for (std::size_t i = 0; i < flat.size(); ++i) {
        out.write(format_double(flat[i]));
        out.write((i + 1) % 8 == 0 || i + 1 == flat.size() ? "\n" : " ");
    }
    out.commit();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    std::string buf;
    if (!std::getline(in, buf) || buf != "ordsim-checkpoint v1")
        throw DataError("'" + path.string() + "' is not an ordsim checkpoint");

    Checkpoint ckpt;
    {
        auto f = next_fields(in, buf, "seed");
        if (f.size() != 2) throw DataError("checkpoint: malformed 'seed' line");
        ckpt.seed = parse_u64(f[1], "seed");
    }
    {
        auto f = next_fields(in, buf, "best_val_loss");
        if (f.size() != 2)
            throw DataError("checkpoint: malformed 'best_val_loss' line");
        ckpt.best_val_loss = parse_double(f[1], "best_val_loss");
    }
    {
        auto f = next_fields(in, buf, "input_dim");
        if (f.size() != 2)
            throw DataError("checkpoint: malformed 'input_dim' line");
        ckpt.params.input_dim = static_cast<int>(parse_int(f[1], "input_dim"));
    }
    std::size_t layer_count = 0;
    {
        auto f = next_fields(in, buf, "layers");
        if (f.size() != 2) throw DataError("checkpoint: malformed 'layers' line");
        const auto n = parse_int(f[1], "layers");
        if (n < 0) throw DataError("checkpoint: negative layer count");
        layer_count = static_cast<std::size_t>(n);
    }
    for (std::size_t i = 0; i < layer_count; ++i) {
        auto f = next_fields(in, buf, "layer");
        if (f.size() != 5) throw DataError("checkpoint: malformed 'layer' line");
        LayerSpec spec;
        spec.input_dim = static_cast<int>(parse_int(f[1], "layer input"));
        spec.output_dim = static_cast<int>(parse_int(f[2], "layer output"));
        spec.activation = activation_from(f[3]);
        spec.dropout = parse_double(f[4], "dropout");
        ckpt.params.specs.push_back(spec);
    }
    int head_outputs = 0;
    {
        auto f = next_fields(in, buf, "head");
        if (f.size() != 4) throw DataError("checkpoint: malformed 'head' line");
        if (f[1] == "coral") {
            ckpt.params.head.kind = HeadKind::coral;
        } else if (f[1] == "scalar-linear") {
            ckpt.params.head.kind = HeadKind::scalar_linear;
        } else {
            throw DataError("checkpoint: unknown head kind '" + std::string(f[1]) +
                            "'");
        }
        if (f[2] == "bias") {
            ckpt.params.head.bias = true;
        } else if (f[2] == "nobias") {
            ckpt.params.head.bias = false;
        } else {
            throw DataError("checkpoint: head bias flag must be bias|nobias");
        }
        head_outputs = static_cast<int>(parse_int(f[3], "head outputs"));
        if (ckpt.params.head.kind == HeadKind::coral) {
            if (head_outputs < 1)
                throw DataError("checkpoint: coral head needs outputs >= 1");
            ckpt.params.head.coral_outputs = head_outputs;
        } else if (head_outputs != 1) {
            throw DataError("checkpoint: scalar-linear head must have 1 output");
        }
    }
    {
        auto fk = next_fields(in, buf, "k");
        if (fk.size() != 2) throw DataError("checkpoint: malformed 'k' line");
        const auto k = parse_int(fk[1], "k");
        auto fb = next_fields(in, buf, "boundaries");
        std::vector<double> boundaries;
        for (std::size_t i = 1; i < fb.size(); ++i)
            boundaries.push_back(parse_double(fb[i], "boundary"));
        auto fm = next_fields(in, buf, "midpoints");
        std::vector<double> midpoints;
        for (std::size_t i = 1; i < fm.size(); ++i)
            midpoints.push_back(parse_double(fm[i], "midpoint"));
        if (boundaries.size() != static_cast<std::size_t>(k) + 1)
            throw DataError("checkpoint: k does not match the boundary list");
        ckpt.scheme = BucketScheme(std::move(boundaries), std::move(midpoints));
        if (ckpt.params.head.kind == HeadKind::coral &&
            ckpt.params.head.coral_outputs != ckpt.scheme.bucket_count() - 1)
            throw DataError("checkpoint: coral outputs disagree with scheme k");
    }

    if (ckpt.params.input_dim < 1)
        throw DataError("checkpoint: input_dim must be positive");
    {
        int expected = ckpt.params.input_dim;
        for (std::size_t i = 0; i < layer_count; ++i) {
            const auto& spec = ckpt.params.specs[i];
            if (spec.input_dim != expected)
                throw DataError("checkpoint: layer " + std::to_string(i) +
                                " does not chain dimensionally");
            if (!(spec.dropout >= 0.0 && spec.dropout < 1.0))
                throw DataError("checkpoint: layer " + std::to_string(i) +
                                " dropout outside [0, 1)");
            expected = spec.output_dim;
        }
    }

    // Size the parameter arrays from the specs, then fill from the flat list.
    ckpt.params.layers.resize(layer_count);
    for (std::size_t i = 0; i < layer_count; ++i) {
        const auto& spec = ckpt.params.specs[i];
        if (spec.input_dim < 1 || spec.output_dim < 1)
            throw DataError("checkpoint: layer " + std::to_string(i) +
                            " has non-positive dimensions");
        ckpt.params.layers[i].w.resize(static_cast<std::size_t>(spec.input_dim) *
                                       spec.output_dim);
        ckpt.params.layers[i].b.resize(static_cast<std::size_t>(spec.output_dim));
    }
    ckpt.params.head_w.resize(
        static_cast<std::size_t>(ckpt.params.penultimate_dim()));
    if (ckpt.params.head.kind == HeadKind::coral) {
        ckpt.params.head_b.resize(
            static_cast<std::size_t>(ckpt.params.head.coral_outputs));
    } else {
        ckpt.params.head_b.resize(ckpt.params.head.bias ? 1 : 0);
    }

    std::size_t declared = 0;
    {
        auto f = next_fields(in, buf, "params");
        if (f.size() != 2) throw DataError("checkpoint: malformed 'params' line");
        const auto n = parse_int(f[1], "params");
        if (n < 0) throw DataError("checkpoint: negative parameter count");
        declared = static_cast<std::size_t>(n);
    }
    if (declared != param_count(ckpt.params))
        throw DataError("checkpoint: declares " + std::to_string(declared) +
                        " parameters, architecture needs " +
                        std::to_string(param_count(ckpt.params)));

    std::vector<double> flat;
    flat.reserve(declared);
    while (flat.size() < declared && std::getline(in, buf)) {
        for (const auto field : split_whitespace(buf))
            flat.push_back(parse_double(field, "parameter"));
    }
    if (flat.size() != declared)
        throw DataError("checkpoint: expected " + std::to_string(declared) +
                        " parameter values, found " + std::to_string(flat.size()));
    try {
        assign_params(ckpt.params, flat);
    } catch (const UsageError& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    return ckpt;
}

}  // namespace ordsim
