#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "lao/dataset.hpp"
#include "lao/learners.hpp"

using namespace lao;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lao_test_dataset";
    fs::create_directories(dir);
    return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> idx_images(std::uint32_t n, std::uint32_t rows, std::uint32_t cols,
                                     const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> b;
    put_be32(b, 2051);
    put_be32(b, n);
    put_be32(b, rows);
    put_be32(b, cols);
    b.insert(b.end(), pixels.begin(), pixels.end());
    return b;
}

std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> b;
    put_be32(b, 2049);
    put_be32(b, static_cast<std::uint32_t>(labels.size()));
    b.insert(b.end(), labels.begin(), labels.end());
    return b;
}

Dataset small() {
    return Dataset({LabeledInstance({3.0, 4.0}, 1.0), LabeledInstance({-1.0, 0.5}, -2.0),
                    LabeledInstance({0.0, -2.0}, 0.0)});
}

} // namespace

TEST_CASE("dataset basics") {
    const auto ds = small();
    CHECK(ds.size() == 3);
    CHECK(ds.dim() == 2);
    CHECK(ds.label_bound() == 2.0);
    CHECK(ds.prefix(2).size() == 2);
    const std::vector<std::size_t> idx{2, 0};
    const auto sub = ds.subset(idx);
    CHECK(sub[0].target() == 0.0);
    CHECK(sub[1].target() == 1.0);
    CHECK_THROWS_AS(Dataset({LabeledInstance({1.0}, 0.0), LabeledInstance({1.0, 2.0}, 0.0)}), InvalidInput);
}

TEST_CASE("normalization") {
    const auto ds = small();
    CHECK(max_instance_norm(ds, NormCertificate::L2) == doctest::Approx(5.0));
    CHECK(max_instance_norm(ds, NormCertificate::Linf) == doctest::Approx(4.0));
    const auto l2 = normalize(ds, NormCertificate::L2);
    CHECK(l2.norm_certificate() == NormCertificate::L2);
    CHECK(satisfies_certificate(l2, NormCertificate::L2));
    CHECK(l2[0].attributes(unmetered)[0] == doctest::Approx(0.6));
    CHECK(l2[1].target() == -2.0);
    const auto again = normalize(l2, NormCertificate::L2);
    CHECK(again[0].attributes(unmetered)[1] == l2[0].attributes(unmetered)[1]);
    const auto linf = normalize(ds, NormCertificate::Linf);
    CHECK(max_instance_norm(linf, NormCertificate::Linf) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalize(Dataset({LabeledInstance({0.0, 0.0}, 1.0)}), NormCertificate::L2), ConfigError);

    const Dataset pix({LabeledInstance({0.0, 255.0, 51.0}, 3.0)}, NormCertificate::None, true);
    const auto p = normalize(pix, NormCertificate::Linf);
    CHECK(p[0].attributes(unmetered)[1] == 1.0);
    CHECK(p[0].attributes(unmetered)[2] == doctest::Approx(0.2));

    CHECK_THROWS_AS(require_normalized(ds, NormKind::L2, 2.0), ConfigError);
    CHECK_THROWS_AS(require_normalized(l2, NormKind::L2, 1.0), ConfigError);  // |y| = 2 > B
    CHECK_NOTHROW(require_normalized(l2, NormKind::L2, 2.0));
}

TEST_CASE("binary tasks") {
    const Dataset raw({LabeledInstance({1.0}, 3.0), LabeledInstance({2.0}, 5.0), LabeledInstance({3.0}, 7.0),
                       LabeledInstance({4.0}, 3.0)});
    const auto t = make_binary_task(raw, 5, 3);
    REQUIRE(t.size() == 3);
    CHECK(t[0].target() == -1.0);
    CHECK(t[1].target() == 1.0);
    CHECK(t[2].attributes(unmetered)[0] == 4.0);
    CHECK_THROWS(make_binary_task(raw, 1, 2));
    CHECK_THROWS(make_binary_task(raw, 3, 3));
}

TEST_CASE("folds and splits") {
    const auto task = synth_linear(3, 103, 3, 0.0, NormCertificate::L2, 1);
    const auto plan = kfold(task.data, 10, 4);
    auto sizes = plan.fold_sizes();
    std::sort(sizes.begin(), sizes.end());
    CHECK(std::count(sizes.begin(), sizes.end(), 10u) == 7);
    CHECK(std::count(sizes.begin(), sizes.end(), 11u) == 3);
    for (std::size_t f = 0; f < 10; ++f) {
        CHECK(plan.validation_indices(f).size() + plan.training_indices(f).size() == 103);
    }
    CHECK(kfold(task.data, 10, 4).assignment == plan.assignment);
    CHECK(kfold(task.data, 10, 5).assignment != plan.assignment);
    const auto ten = kfold(task.data.prefix(10), 10, 1);
    CHECK(ten.fold_sizes() == std::vector<std::size_t>(10, 1));
    CHECK_THROWS(kfold(task.data, 1, 0));
    CHECK_THROWS(kfold(task.data.prefix(5), 10, 0));

    const auto [train, test] = split(task.data, 0.8, 2);
    CHECK(train.size() == 82);
    CHECK(test.size() == 21);
    const auto [train2, test2] = split(task.data, 0.8, 2);
    CHECK(train2[0].target() == train[0].target());
    CHECK_THROWS(split(task.data, 1.5, 0));
    const auto [a, b] = split(task.data.prefix(2), 0.99, 0);
    CHECK(a.size() == 1);
    CHECK(b.size() == 1);
}

TEST_CASE("IDX round trip") {
    const auto surrogate = synth_digit_surrogate(20, 3);
    const auto img = temp_path("rt.idx"), lab = temp_path("rt.idx.labels");
    write_idx(surrogate, 28, 28, img, lab);
    const auto back = load_idx(img, lab);
    REQUIRE(back.size() == 20);
    CHECK(back.dim() == 784);
    CHECK(back.pixel_data());
    for (std::size_t t = 0; t < 20; ++t) {
        CHECK(back[t].target() == surrogate[t].target());
        const auto x = back[t].attributes(unmetered), y = surrogate[t].attributes(unmetered);
        CHECK(std::equal(x.begin(), x.end(), y.begin()));
    }
}

TEST_CASE("IDX errors") {
    const auto img = temp_path("bad.idx"), lab = temp_path("bad.labels");
    const std::vector<std::uint8_t> px{1, 2, 3, 4, 5, 6, 7, 8};
    write_bytes(lab, idx_labels({3, 5}));

    SUBCASE("bad magic") {
        auto b = idx_images(2, 2, 2, px);
        b[3] = 0x04;
        write_bytes(img, b);
        CHECK_THROWS_AS(load_idx(img, lab), FormatError);
    }
    SUBCASE("truncated pixels") {
        write_bytes(img, idx_images(2, 2, 2, {1, 2, 3}));
        CHECK_THROWS_AS(load_idx(img, lab), FormatError);
    }
    SUBCASE("count mismatch") {
        write_bytes(img, idx_images(2, 2, 2, px));
        write_bytes(lab, idx_labels({3, 5, 7}));
        CHECK_THROWS_AS(load_idx(img, lab), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_idx(temp_path("nope.idx"), lab), FormatError);
    }
}

TEST_CASE("IDX decoding agrees with a direct byte decoder") {
    std::mt19937 gen(12);
    std::uniform_int_distribution<int> byte(0, 255), size(1, 6);
    const auto img = temp_path("fuzz.idx"), lab = temp_path("fuzz.labels");
    for (int it = 0; it < 50; ++it) {
        const auto n = static_cast<std::uint32_t>(size(gen)), r = static_cast<std::uint32_t>(size(gen)),
                   c = static_cast<std::uint32_t>(size(gen));
        std::vector<std::uint8_t> px(n * r * c), lb(n);
        for (auto& v : px) v = static_cast<std::uint8_t>(byte(gen));
        for (auto& v : lb) v = static_cast<std::uint8_t>(byte(gen) % 10);
        const auto bytes = idx_images(n, r, c, px);
        write_bytes(img, bytes);
        write_bytes(lab, idx_labels(lb));
        const auto ds = load_idx(img, lab);
        REQUIRE(ds.size() == n);
        for (std::uint32_t t = 0; t < n; ++t) {
            CHECK(ds[t].target() == lb[t]);
            for (std::uint32_t i = 0; i < r * c; ++i) CHECK(ds[t].attributes(unmetered)[i] == bytes[16 + t * r * c + i]);
        }
    }
}

TEST_CASE("CSV") {
    const auto p = temp_path("rt.csv");
    const auto task = synth_linear(4, 30, 4, 0.1, NormCertificate::L2, 2);
    for (bool header : {true, false}) {
        write_csv(task.data, p, header);
        const auto back = load_csv(p);
        REQUIRE(back.size() == 30);
        for (std::size_t t = 0; t < 30; ++t) {
            CHECK(back[t].target() == task.data[t].target());
            const auto x = back[t].attributes(unmetered), y = task.data[t].attributes(unmetered);
            CHECK(std::equal(x.begin(), x.end(), y.begin()));
        }
    }
    auto write_text = [&](const std::string& s) {
        std::ofstream(p) << s;
    };
    write_text("a,b,y\n1,2,3\n4,5\n");
    CHECK_THROWS_AS(load_csv(p), FormatError);
    write_text("1,2,3\n4,x,6\n");
    CHECK_THROWS_AS(load_csv(p), FormatError);
    write_text("");
    CHECK_THROWS_AS(load_csv(p), FormatError);
    write_text("1.5,-2,0.25\n");
    CHECK(load_csv(p)[0].attributes(unmetered)[1] == -2.0);
    CHECK_THROWS_AS(load_csv(temp_path("missing.csv")), FormatError);
}

TEST_CASE("linear generator") {
    const auto l2 = synth_linear(10, 500, 3, 0.0, NormCertificate::L2, 8, 2.0);
    CHECK(l2.data.norm_certificate() == NormCertificate::L2);
    CHECK(satisfies_certificate(l2.data, NormCertificate::L2));
    CHECK(l2_norm(l2.w_star) == doctest::Approx(2.0));
    CHECK(std::count_if(l2.w_star.begin(), l2.w_star.end(), [](double v) { return v != 0.0; }) == 3);
    // noise-free: targets are exactly w*.x (the clamp never binds since |w*.x| <= B)
    for (const auto& z : l2.data) CHECK(z.target() == doctest::Approx(predict(l2.w_star, z)).epsilon(1e-12));
    CHECK(mean_squared_error(l2.w_star, l2.data) < 1e-20);
    const auto again = synth_linear(10, 500, 3, 0.0, NormCertificate::L2, 8, 2.0);
    CHECK(again.w_star == l2.w_star);

    const auto linf = synth_linear(10, 500, 10, 0.3, NormCertificate::Linf, 8);
    CHECK(satisfies_certificate(linf.data, NormCertificate::Linf));
    CHECK(l1_norm(linf.w_star) == doctest::Approx(1.0));
    CHECK(linf.data.label_bound() <= 1.0);
    CHECK(mean_squared_error(linf.w_star, linf.data) <= 0.3 * 0.3 * 1.2);
}

TEST_CASE("lower-bound generator") {
    const auto g = synth_lower_bound(50, 0.25, 3);
    CHECK(g.support().size() == 16);
    CHECK(g.signs().size() == 16);
    const auto data = g.sample(2000, 1);
    for (const auto& z : data) {
        CHECK(z.target() == 1.0);
        CHECK(l2_norm(z.attributes(unmetered)) == 1.0);
    }
    const auto w = g.w_star();
    CHECK(l2_norm(w) == doctest::Approx(1.0));
    // every example puts loss 1/2 (1 - eps)^2 on w*
    CHECK(evaluate(w, data, LossSpec::squared()) == doctest::Approx(0.5 * 0.75 * 0.75).epsilon(1e-12));
    const auto one = synth_lower_bound(10, 1.0, 3);
    CHECK(evaluate(one.w_star(), one.sample(50, 2), LossSpec::squared()) == doctest::Approx(0.0));
    CHECK_THROWS(synth_lower_bound(10, 0.2, 1));  // needs 25 coordinates
}

TEST_CASE("digit surrogate") {
    const auto ds = synth_digit_surrogate(200, 4);
    CHECK(ds.size() == 200);
    CHECK(ds.dim() == 784);
    CHECK(ds.pixel_data());
    int threes = 0;
    for (const auto& z : ds) {
        CHECK((z.target() == 3.0 || z.target() == 5.0));
        threes += z.target() == 3.0;
        for (double v : z.attributes(unmetered)) {
            CHECK(v == std::round(v));
            CHECK(v >= 0.0);
            CHECK(v <= 255.0);
        }
    }
    CHECK(threes > 50);
    CHECK(threes < 150);
    const auto again = synth_digit_surrogate(200, 4);
    CHECK(std::equal(again[7].attributes(unmetered).begin(), again[7].attributes(unmetered).end(),
                     ds[7].attributes(unmetered).begin()));
}
