#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldr/construct.hpp"
#include "ldr/model_io.hpp"
#include "ldr/rng.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

using namespace ldr;

namespace {

PairPtr workhorse_pair(Index n) {
    Vec d(n);
    for (Index i = 0; i < n; ++i)
        d[i] = n == 1 ? 0.5 : 0.3 + 0.4 * static_cast<double>(i) / static_cast<double>(n - 1);
    return make_pair_ptr(OperatorMatrix::unit_circulant(n, 1.0), OperatorMatrix::diagonal(d));
}

NetworkModel random_model(std::uint64_t seed) {
    Rng rng(seed);
    LdrLayer layer(workhorse_pair(5), 2, 1, Activation::sigmoid);
    layer.randomize(rng, 0.8);
    std::vector<LdrLayer> layers;
    layers.push_back(std::move(layer));
    Readout ro;
    ro.alpha = rng.normal_vec(10);
    ro.bias = rng.normal();
    return NetworkModel(std::move(layers), std::move(ro));
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/ldr_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("save/load round trip reproduces forward outputs bit for bit") {
    const NetworkModel model = random_model(201);
    TempFile file("roundtrip.json");
    save_model(model, file.path);
    const NetworkModel loaded = load_model(file.path);

    Rng rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec x = rng.normal_vec(5);
        const double a = model.forward(x);
        const double b = loaded.forward(x);
        CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
    }
}

TEST_CASE("operator kinds survive the round trip") {
    const Index n = 3;
    Rng rng(203);
    Mat dense(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) dense(i, j) = rng.normal();

    for (const OperatorMatrix& op :
         {OperatorMatrix::unit_circulant(n, 2.0), OperatorMatrix::unit_circulant_transposed(n, 0.0),
          OperatorMatrix::diagonal(rng.uniform_vec(n, 0.1, 0.9)), OperatorMatrix::dense(dense)}) {
        const Json j = operator_to_json(op);
        const OperatorMatrix back = operator_from_json(j, n, "op");
        CHECK(back.kind() == op.kind());
        CHECK(max_abs(Mat(back.to_dense() - op.to_dense())) == 0.0);
    }
}

TEST_CASE("truncated files raise a malformed-file error") {
    const NetworkModel model = random_model(204);
    TempFile file("truncated.json");
    save_model(model, file.path);

    std::ifstream in(file.path);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(file.path, std::ios::trunc);
    out << body.substr(0, body.size() / 2);
    out.close();

    CHECK_THROWS_AS(load_model(file.path), IoError);
}

TEST_CASE("missing files raise an I/O error") {
    CHECK_THROWS_AS(load_model("/tmp/ldr_test_does_not_exist.json"), IoError);
}

TEST_CASE("version mismatch is rejected") {
    const NetworkModel model = random_model(205);
    Json j = model_to_json(model);
    j["format_version"] = 999;
    TempFile file("version.json");
    save_json(j, file.path);
    try {
        load_model(file.path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
}

TEST_CASE("dimension mismatch names the offending field") {
    const NetworkModel model = random_model(206);
    Json j = model_to_json(model);
    j["layers"][0]["blocks"][0]["G"].erase(0);  // drop one entry
    TempFile file("badshape.json");
    save_json(j, file.path);
    try {
        load_model(file.path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("blocks[0].G") != std::string::npos);
    }
}

TEST_CASE("theta length mismatch is caught") {
    const NetworkModel model = random_model(207);
    Json j = model_to_json(model);
    j["layers"][0]["theta"].erase(0);
    TempFile file("badtheta.json");
    save_json(j, file.path);
    try {
        load_model(file.path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("theta") != std::string::npos);
    }
}

TEST_CASE("embedding artifacts carry the certificate data") {
    // hand-made embedding json shape check via a real construction
    const PairPtr pair = workhorse_pair(4);
    Rng rng(208);
    const Vec v = rng.normal_vec(4);
    const ColumnEmbedding emb = construct_with_column(pair, v);
    const Json j = embedding_to_json(emb);
    CHECK(j.at("kind") == "column_embedding");
    CHECK(j.at("n") == 4);
    CHECK(j.at("residual").get<double>() <= tol::certificate);
    CHECK(j.at("g").size() == 4);
    CHECK(j.at("h").size() == 4);
    CHECK(vec_from_json(j.at("v"), "v").isApprox(v));
}
