#include "ldr/model_io.hpp"

#include <fstream>
#include <sstream>

namespace ldr {

namespace {

const Json& need(const Json& j, const std::string& key, const std::string& field) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError("missing field '" + (field.empty() ? key : field + "." + key) + "'");
    return j.at(key);
}

double need_number(const Json& j, const std::string& key, const std::string& field) {
    const Json& v = need(j, key, field);
    if (!v.is_number()) throw ValidationError("field '" + field + "." + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const Json& j, const std::string& field) {
    if (!j.is_array()) throw ValidationError("field '" + field + "' must be an array");
    Vec v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) {
        const Json& e = j.at(static_cast<std::size_t>(i));
        if (!e.is_number()) throw ValidationError("field '" + field + "' must contain numbers");
        v[i] = e.get<double>();
    }
    return v;
}

Json mat_to_json(const Mat& m) {
    Json a = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    return a;
}

Mat mat_from_json(const Json& j, Index rows, Index cols, const std::string& field) {
    if (!j.is_array()) throw ValidationError("field '" + field + "' must be an array");
    if (static_cast<Index>(j.size()) != rows * cols) {
        std::ostringstream os;
        os << "field '" << field << "': expected " << rows << "x" << cols << " = " << rows * cols
           << " entries, got " << j.size();
        throw ValidationError(os.str());
    }
    Mat m(rows, cols);
    Index p = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index c = 0; c < cols; ++c, ++p) {
            const Json& e = j.at(static_cast<std::size_t>(p));
            if (!e.is_number()) throw ValidationError("field '" + field + "' must contain numbers");
            m(i, c) = e.get<double>();
        }
    return m;
}

Json operator_to_json(const OperatorMatrix& op) {
    Json j;
    switch (op.kind()) {
        case OperatorKind::unit_circulant:
            j["kind"] = "unit_circulant";
            j["f"] = op.shift_weight();
            j["transposed"] = op.transposed();
            break;
        case OperatorKind::diagonal:
            j["kind"] = "diagonal";
            j["d"] = vec_to_json(op.diagonal_entries());
            break;
        case OperatorKind::dense:
            j["kind"] = "dense";
            j["m"] = mat_to_json(op.to_dense());
            break;
    }
    return j;
}

OperatorMatrix operator_from_json(const Json& j, Index n, const std::string& field) {
    const Json& kind = need(j, "kind", field);
    if (!kind.is_string()) throw ValidationError("field '" + field + ".kind' must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "unit_circulant") {
        const double f = need_number(j, "f", field);
        const bool up = j.value("transposed", false);
        return up ? OperatorMatrix::unit_circulant_transposed(n, f)
                  : OperatorMatrix::unit_circulant(n, f);
    }
    if (k == "diagonal") {
        if (j.contains("linspace")) {
            const Json& ls = j.at("linspace");
            if (!ls.is_array() || ls.size() != 2)
                throw ValidationError("field '" + field + ".linspace' must be [lo, hi]");
            const double lo = ls.at(0).get<double>();
            const double hi = ls.at(1).get<double>();
            Vec d(n);
            for (Index i = 0; i < n; ++i)
                d[i] = n == 1 ? lo
                              : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            return OperatorMatrix::diagonal(std::move(d));
        }
        Vec d = vec_from_json(need(j, "d", field), field + ".d");
        if (d.size() != n) {
            std::ostringstream os;
            os << "field '" << field << ".d': expected " << n << " entries, got " << d.size();
            throw ValidationError(os.str());
        }
        return OperatorMatrix::diagonal(std::move(d));
    }
    if (k == "dense") {
        return OperatorMatrix::dense(mat_from_json(need(j, "m", field), n, n, field + ".m"));
    }
    throw ValidationError("field '" + field + ".kind': unknown operator kind '" + k + "'");
}

Json pair_to_json(const OperatorPair& pair) {
    Json j;
    j["A"] = operator_to_json(pair.A());
    j["B"] = operator_to_json(pair.B());
    return j;
}

OperatorPair pair_from_json(const Json& j, Index n, const std::string& field) {
    OperatorMatrix a = operator_from_json(need(j, "A", field), n, field + ".A");
    OperatorMatrix b = operator_from_json(need(j, "B", field), n, field + ".B");
    return OperatorPair(std::move(a), std::move(b));
}

Json model_to_json(const NetworkModel& model) {
    Json j;
    j["format_version"] = kModelFormatVersion;
    Json layers = Json::array();
    for (Index l = 0; l < model.layer_count(); ++l) {
        const LdrLayer& layer = model.layer(l);
        Json jl;
        jl["n"] = layer.input_dim();
        jl["k"] = layer.block_count();
        jl["r"] = layer.generator_rank();
        jl["activation"] = activation_name(layer.activation());
        jl["pair"] = pair_to_json(*layer.pair());
        Json blocks = Json::array();
        for (Index i = 0; i < layer.block_count(); ++i) {
            Json bl;
            bl["G"] = mat_to_json(layer.G(i));
            bl["H"] = mat_to_json(layer.H(i));
            blocks.push_back(std::move(bl));
        }
        jl["blocks"] = std::move(blocks);
        jl["theta"] = vec_to_json(layer.theta());
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    Json ro;
    ro["alpha"] = vec_to_json(model.readout().alpha);
    ro["bias"] = model.readout().bias;
    j["readout"] = std::move(ro);
    return j;
}

NetworkModel model_from_json(const Json& j) {
    const Json& ver = need(j, "format_version", "");
    if (!ver.is_number_integer() || ver.get<int>() != kModelFormatVersion) {
        std::ostringstream os;
        os << "model file version mismatch: expected " << kModelFormatVersion << ", got " << ver;
        throw ValidationError(os.str());
    }
    const Json& jlayers = need(j, "layers", "");
    if (!jlayers.is_array() || jlayers.empty())
        throw ValidationError("field 'layers' must be a nonempty array");

    std::vector<LdrLayer> layers;
    for (std::size_t l = 0; l < jlayers.size(); ++l) {
        const std::string field = "layers[" + std::to_string(l) + "]";
        const Json& jl = jlayers.at(l);
        const Index n = static_cast<Index>(need_number(jl, "n", field));
        const Index k = static_cast<Index>(need_number(jl, "k", field));
        const Index r = static_cast<Index>(need_number(jl, "r", field));
        if (n < 1 || k < 1 || r < 1)
            throw ValidationError("field '" + field + "': n, k, r must be positive");
        const Json& jact = need(jl, "activation", field);
        if (!jact.is_string())
            throw ValidationError("field '" + field + ".activation' must be a string");
        const Activation act = activation_from_name(jact.get<std::string>());
        PairPtr pair = std::make_shared<const OperatorPair>(
            pair_from_json(need(jl, "pair", field), n, field + ".pair"));

        LdrLayer layer(pair, k, r, act);
        const Json& jblocks = need(jl, "blocks", field);
        if (!jblocks.is_array() || static_cast<Index>(jblocks.size()) != k) {
            std::ostringstream os;
            os << "field '" << field << ".blocks': expected " << k << " blocks, got "
               << jblocks.size();
            throw ValidationError(os.str());
        }
        for (Index i = 0; i < k; ++i) {
            const std::string bf = field + ".blocks[" + std::to_string(i) + "]";
            const Json& jb = jblocks.at(static_cast<std::size_t>(i));
            Mat g = mat_from_json(need(jb, "G", bf), n, r, bf + ".G");
            Mat h = mat_from_json(need(jb, "H", bf), n, r, bf + ".H");
            layer.set_block(i, std::move(g), std::move(h));
        }
        Vec theta = vec_from_json(need(jl, "theta", field), field + ".theta");
        if (theta.size() != n * k) {
            std::ostringstream os;
            os << "field '" << field << ".theta': expected " << n * k << " entries, got "
               << theta.size();
            throw ValidationError(os.str());
        }
        layer.set_theta(std::move(theta));
        layers.push_back(std::move(layer));
    }

    const Json& jro = need(j, "readout", "");
    Readout ro;
    ro.alpha = vec_from_json(need(jro, "alpha", "readout"), "readout.alpha");
    ro.bias = need_number(jro, "bias", "readout");
    return NetworkModel(std::move(layers), std::move(ro));
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IoError("malformed file '" + path + "': " + e.what());
    }
}

void save_model(const NetworkModel& model, const std::string& path) {
    save_json(model_to_json(model), path);
}

NetworkModel load_model(const std::string& path) { return model_from_json(load_json(path)); }

Json embedding_to_json(const ColumnEmbedding& embedding) {
    Json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "column_embedding";
    j["n"] = embedding.rep.size();
    j["j"] = embedding.j;
    j["residual"] = embedding.residual;
    j["g"] = vec_to_json(embedding.rep.G().col(0));
    j["h"] = vec_to_json(embedding.rep.H().col(0));
    j["v"] = vec_to_json(embedding.v);
    j["pair"] = pair_to_json(embedding.rep.pair());
    return j;
}

}  // namespace ldr
