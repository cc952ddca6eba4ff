#include "sectobs/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

using namespace sectobs;

namespace {

CurveInput family_input(long p, long a) {
    return CurveInput{std::pair<Integer, Integer>{p, a}, std::nullopt};
}

CurveInput coeff_input(std::array<long, 7> f) {  // f6..f0
    std::array<Rational, 7> c{};
    for (int i = 0; i < 7; ++i) c[size_t(6 - i)] = Rational(f[size_t(i)]);
    return CurveInput{std::nullopt, c};
}

nlohmann::json normalized(const CurveCertificate& cert) {
    nlohmann::json j = certificate_to_json(cert);
    j["meta"]["elapsed_ms"] = 0;
    return j;
}

struct TempDir {
    std::filesystem::path path;
    TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("analyze certifies the worked example end to end") {
    CurveCertificate cert = analyze(family_input(7, -11));
    CHECK(cert.everywhere_locally_solvable);
    CHECK(cert.lemma);
    CHECK(cert.lemma->cond_i);
    CHECK(cert.lemma->cond_ii);
    CHECK(cert.torsion_dimension == 2);
    REQUIRE(cert.q1);
    REQUIRE(cert.q2);
    CHECK(cert.q1->descent->certified_rank == 1);
    CHECK(cert.q2->descent->certified_rank == 1);
    CHECK(cert.jrank.rank == 2);
    REQUIRE(cert.kernel);
    CHECK(cert.kernel->image_rank == 4);
    CHECK(cert.kernel->verdict);
    CHECK(cert.no_rational_deg1_class);
    CHECK(cert.satisfies_prop_1_3);
    CHECK(cert.generators.size() == 4);
    CHECK(verify_certificate(cert).empty());
}

TEST_CASE("analyze reports the Stoll curve's local failure at 2") {
    CurveCertificate cert = analyze(coeff_input({3, 0, 8, 0, 2, 0, -6}));
    CHECK_FALSE(cert.everywhere_locally_solvable);
    CHECK_FALSE(cert.satisfies_prop_1_3);
    CHECK_FALSE(cert.factorization_supported);
    int failures = 0;
    for (const auto& r : cert.local.reports) {
        if (!r.solvable) {
            ++failures;
            CHECK_FALSE(r.place.is_real());
            CHECK(r.place.p() == 2);
        }
    }
    CHECK(failures == 1);
}

TEST_CASE("analyze on a curve with a rational point") {
    CurveCertificate cert = analyze(coeff_input({1, 0, 0, 0, 0, 0, 1}));
    CHECK(cert.everywhere_locally_solvable);
    CHECK_FALSE(cert.no_rational_deg1_class);  // nothing is (or could be) established
    CHECK_FALSE(cert.satisfies_prop_1_3);
}

TEST_CASE("analyze rejects bad input") {
    CHECK_THROWS_AS(analyze(CurveInput{}), input_error);
    CHECK_THROWS_AS(analyze(family_input(7, 7)), input_error);
    CHECK_THROWS_AS(analyze(coeff_input({0, 0, 0, 0, 0, 0, 1})), input_error);
}

TEST_CASE("determinism modulo timing") {
    CurveCertificate a = analyze(family_input(7, -11));
    CurveCertificate b = analyze(family_input(7, -11));
    CHECK(normalized(a).dump() == normalized(b).dump());
}

TEST_CASE("certificate round trip and schema guards") {
    TempDir dir("sectobs_cert_test");
    CurveCertificate cert = analyze(family_input(7, -11));
    std::string path = (dir.path / "c.json").string();
    emit_certificate(cert, path);

    CurveCertificate loaded = load_certificate(path);
    std::string path2 = (dir.path / "c2.json").string();
    emit_certificate(loaded, path2);
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);

    SECTION("schema version bump is rejected") {
        nlohmann::json j = certificate_to_json(cert);
        j["schema_version"] = 99;
        CHECK_THROWS_WITH(certificate_from_json(j),
                          Catch::Matchers::ContainsSubstring("unsupported schema version"));
    }
    SECTION("missing field is named") {
        nlohmann::json j = certificate_to_json(cert);
        j.erase("verdicts");
        try {
            certificate_from_json(j);
            FAIL("expected a parse failure");
        } catch (const input_error& e) {
            CHECK(std::string(e.what()).find("verdicts") != std::string::npos);
        }
    }
    SECTION("corrupted json is an input error") {
        std::string bad = (dir.path / "bad.json").string();
        std::ofstream(bad) << "{ not json";
        CHECK_THROWS_AS(load_certificate(bad), input_error);
    }
}

TEST_CASE("verify_certificate catches tampering") {
    CurveCertificate cert = analyze(family_input(7, -11));
    REQUIRE(verify_certificate(cert).empty());

    SECTION("flipped verdict") {
        CurveCertificate bad = cert;
        bad.satisfies_prop_1_3 = false;
        CHECK_FALSE(verify_certificate(bad).empty());
    }
    SECTION("tampered mu image") {
        CurveCertificate bad = cert;
        bad.generator_images[0].components[0] =
            SquareClass(QuadElement::rational(3, bad.generator_images[0].components[0].d));
        CHECK_FALSE(verify_certificate(bad).empty());
    }
    SECTION("tampered kernel rank") {
        CurveCertificate bad = cert;
        bad.kernel->image_rank = 3;
        CHECK_FALSE(verify_certificate(bad).empty());
    }
    SECTION("tampered discriminant") {
        CurveCertificate bad = cert;
        bad.disc += 1;
        CHECK_FALSE(verify_certificate(bad).empty());
    }
}

TEST_CASE("search_family on a narrow window") {
    SearchOptions opts;
    opts.jobs = 2;
    std::vector<SearchRow> rows = search_family(7, -12, -10, opts);
    REQUIRE(rows.size() == 3);
    int certified = 0;
    for (const auto& row : rows) {
        CHECK(row.p == 7);
        if (row.status == SearchStatus::certified) {
            ++certified;
            CHECK(row.a == -11);
        }
    }
    CHECK(certified == 1);

    CHECK(search_family(7, 7, 7).empty());  // a = p excluded
    CHECK_THROWS_AS(search_family(5, 0, 0), input_error);
}

TEST_CASE("search cache reuse") {
    TempDir dir("sectobs_cache_test");
    SearchOptions opts;
    opts.jobs = 2;
    opts.cache_dir = dir.path.string();

    auto t0 = std::chrono::steady_clock::now();
    std::vector<SearchRow> cold = search_family(7, -12, -10, opts);
    auto t1 = std::chrono::steady_clock::now();
    std::vector<SearchRow> warm = search_family(7, -12, -10, opts);
    auto t2 = std::chrono::steady_clock::now();

    REQUIRE(cold.size() == warm.size());
    for (size_t i = 0; i < cold.size(); ++i) {
        CHECK(cold[i].p == warm[i].p);
        CHECK(cold[i].a == warm[i].a);
        CHECK(cold[i].status == warm[i].status);
    }
    auto cold_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    auto warm_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t2 - t1).count();
    CHECK(warm_ms * 2 < cold_ms);  // cached rerun skips all recomputation
}
