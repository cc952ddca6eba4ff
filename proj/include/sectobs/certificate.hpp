#pragma once

#include "sectobs/descent.hpp"
#include "sectobs/localpoints.hpp"
#include "sectobs/mu.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace sectobs {

constexpr int kSchemaVersion = 1;
constexpr const char* kToolName = "sectobs";
constexpr const char* kToolVersion = "0.1.0";

struct QuotientData {
    RawCubic raw;
    std::optional<EllipticCurve> model;  // absent when integralization fails
    std::optional<DescentResult> descent;
    std::string note;
};

struct CurveCertificate {
    int schema_version = kSchemaVersion;

    std::optional<std::pair<Integer, Integer>> family;
    std::array<Rational, 7> coeffs{};
    Rational disc;

    LocalAnalysis local;

    bool factorization_supported = false;
    std::string factorization_note;
    std::optional<FactoredSextic> factorization;
    std::optional<LemmaConditions> lemma;

    std::optional<int> torsion_dimension;
    std::vector<Poly> torsion_quadratics;

    std::optional<QuotientData> q1, q2;
    JacobianRank jrank;

    std::vector<DivisorClass> generators;
    std::vector<BooleanClass> generator_images;
    std::optional<KernelCertificate> kernel;

    bool everywhere_locally_solvable = false;
    bool no_rational_deg1_class = false;
    bool satisfies_prop_1_3 = false;

    std::vector<std::string> assumptions;

    long elapsed_ms = 0;
    long height_bound = 0;
};

namespace cert_json {

using nlohmann::json;

inline json put(const Rational& q) { return to_string(q); }
inline json put(const Integer& n) { return n.str(); }
inline Rational get_rat(const json& j) { return parse_rational(j.get<std::string>()); }
inline Integer get_int(const json& j) { return Integer(j.get<std::string>()); }

inline json put(const QuadElement& e) {
    return json{{"a", put(e.a)}, {"b", put(e.b)}, {"d", put(e.d)}};
}
inline QuadElement get_quad(const json& j) {
    return QuadElement(get_rat(j.at("a")), get_rat(j.at("b")), get_int(j.at("d")));
}

inline json put(const Poly& p) {
    json coeffs = json::array();
    for (int i = 0; i <= p.degree(); ++i) coeffs.push_back(put(p[size_t(i)]));
    return coeffs;
}
inline Poly get_poly(const json& j) {
    std::vector<Rational> c;
    for (const auto& v : j) c.push_back(get_rat(v));
    return Poly(std::move(c));
}

inline json put(const EllipticPoint& p) {
    if (p.infinity) return json{{"infinity", true}};
    return json{{"x", put(p.x)}, {"y", put(p.y)}};
}
inline EllipticPoint get_epoint(const json& j) {
    if (j.contains("infinity") && j.at("infinity").get<bool>()) return EllipticPoint::at_infinity();
    return EllipticPoint::affine(get_rat(j.at("x")), get_rat(j.at("y")));
}

inline json put_pair(const std::pair<Integer, Integer>& p) {
    return json::array({put(p.first), put(p.second)});
}
inline std::pair<Integer, Integer> get_pair(const json& j) {
    return {get_int(j.at(0)), get_int(j.at(1))};
}

inline json put(const DivisorClass& d) {
    auto pt = [](const CurvePoint& p) { return json{{"x", put(p.x)}, {"y", put(p.y)}}; };
    return json{{"field_d", put(d.field_d)},
                {"p1", pt(d.p1)},
                {"p2", pt(d.p2)},
                {"weierstrass", d.weierstrass}};
}
inline DivisorClass get_divisor(const json& j, const Genus2Curve& c) {
    auto pt = [](const json& v) { return CurvePoint{get_quad(v.at("x")), get_quad(v.at("y"))}; };
    return make_divisor_class(c, pt(j.at("p1")), pt(j.at("p2")));
}

inline json put(const BooleanClass& b) {
    json comps = json::array();
    for (const auto& c : b.components) {
        json supp = json::array();
        for (const auto& p : c.support) supp.push_back(put(p));
        comps.push_back(json{{"d", put(c.d)}, {"rep", put(c.rep)}, {"support", supp}});
    }
    return comps;
}
inline BooleanClass get_boolean(const json& j) {
    BooleanClass out;
    for (const auto& comp : j) out.components.emplace_back(get_quad(comp.at("rep")));
    return out;
}

inline json put(const LocalReport& r) {
    json out{{"place", r.place.str()}, {"solvable", r.solvable}};
    if (r.witness) {
        out["witness"] = json{{"chart", r.witness->chart},
                              {"kind", r.witness->kind},
                              {"coordinate", put(r.witness->coordinate)},
                              {"value_valuation", r.witness->value_valuation},
                              {"y_approx", put(r.witness->y_approx)},
                              {"precision", r.witness->precision}};
    }
    if (!r.solvable) out["exhaustion_depth"] = r.exhaustion_depth;
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}
inline LocalReport get_report(const json& j) {
    std::string place = j.at("place").get<std::string>();
    LocalReport r{place == "real" ? Place::real() : Place::prime(Integer(place))};
    r.solvable = j.at("solvable").get<bool>();
    if (j.contains("witness")) {
        const auto& w = j.at("witness");
        r.witness = LocalWitness{w.at("chart").get<std::string>(),
                                 w.at("kind").get<std::string>(),
                                 get_rat(w.at("coordinate")),
                                 w.at("value_valuation").get<int>(),
                                 get_int(w.at("y_approx")),
                                 w.at("precision").get<unsigned>()};
    }
    if (j.contains("exhaustion_depth")) r.exhaustion_depth = j.at("exhaustion_depth").get<unsigned>();
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    return r;
}

inline json put(const DescentResult& d) {
    json selmer = json::array(), tors = json::array(), gens = json::array(), imgs = json::array();
    for (const auto& s : d.selmer) selmer.push_back(put_pair(s));
    for (const auto& s : d.torsion_image) tors.push_back(put_pair(s));
    for (const auto& g : d.generators) gens.push_back(put(g));
    for (const auto& i : d.generator_images) imgs.push_back(put_pair(i));
    json out{{"e", json::array({put(d.e[0]), put(d.e[1]), put(d.e[2])})},
             {"selmer", selmer},
             {"torsion_image", tors},
             {"generators", gens},
             {"generator_images", imgs},
             {"selmer_dim", d.selmer_dim},
             {"rank_lower", d.rank_lower},
             {"rank_upper", d.rank_upper},
             {"height_bound", d.height_bound}};
    if (d.certified_rank) out["certified_rank"] = *d.certified_rank;
    if (d.sha2_dim) out["sha2_dim"] = *d.sha2_dim;
    return out;
}
inline DescentResult get_descent(const json& j) {
    DescentResult d;
    for (int i = 0; i < 3; ++i) d.e[size_t(i)] = get_int(j.at("e").at(size_t(i)));
    for (const auto& s : j.at("selmer")) d.selmer.push_back(get_pair(s));
    for (const auto& s : j.at("torsion_image")) d.torsion_image.push_back(get_pair(s));
    for (const auto& g : j.at("generators")) d.generators.push_back(get_epoint(g));
    for (const auto& i : j.at("generator_images")) d.generator_images.push_back(get_pair(i));
    d.selmer_dim = j.at("selmer_dim").get<int>();
    d.rank_lower = j.at("rank_lower").get<int>();
    d.rank_upper = j.at("rank_upper").get<int>();
    d.height_bound = j.at("height_bound").get<long>();
    if (j.contains("certified_rank")) d.certified_rank = j.at("certified_rank").get<int>();
    if (j.contains("sha2_dim")) d.sha2_dim = j.at("sha2_dim").get<int>();
    return d;
}

inline json put(const QuotientData& q) {
    json out{{"raw", json::array({put(q.raw.c[0]), put(q.raw.c[1]), put(q.raw.c[2]), put(q.raw.c[3])})}};
    if (q.model) {
        out["model"] = json{{"e", json::array({put(q.model->e[0]), put(q.model->e[1]), put(q.model->e[2])})},
                            {"kx", put(q.model->kx)},
                            {"ky", put(q.model->ky)}};
    }
    if (q.descent) out["descent"] = put(*q.descent);
    if (!q.note.empty()) out["note"] = q.note;
    return out;
}
inline QuotientData get_quotient(const json& j) {
    QuotientData q;
    for (int i = 0; i < 4; ++i) q.raw.c[size_t(i)] = get_rat(j.at("raw").at(size_t(i)));
    if (j.contains("model")) {
        EllipticCurve E;
        for (int i = 0; i < 3; ++i) E.e[size_t(i)] = get_int(j.at("model").at("e").at(size_t(i)));
        E.kx = get_rat(j.at("model").at("kx"));
        E.ky = get_rat(j.at("model").at("ky"));
        q.model = E;
    }
    if (j.contains("descent")) q.descent = get_descent(j.at("descent"));
    if (j.contains("note")) q.note = j.at("note").get<std::string>();
    return q;
}

}  // namespace cert_json

inline nlohmann::json certificate_to_json(const CurveCertificate& cert) {
    using namespace cert_json;
    using nlohmann::json;
    json curve{{"coefficients", json::array()}, {"discriminant", put(cert.disc)}};
    for (int i = 6; i >= 0; --i) curve["coefficients"].push_back(put(cert.coeffs[size_t(i)]));
    if (cert.family)
        curve["family"] = json{{"p", put(cert.family->first)}, {"a", put(cert.family->second)}};

    json local{{"solvable", cert.local.everywhere_solvable},
               {"reports", json::array()},
               {"skipped_places", cert.local.skipped_justification}};
    for (const auto& r : cert.local.reports) local["reports"].push_back(put(r));

    json lemma{{"supported", cert.factorization_supported}};
    if (!cert.factorization_note.empty()) lemma["note"] = cert.factorization_note;
    if (cert.factorization) {
        json factors = json::array();
        for (const auto& f : cert.factorization->factors)
            factors.push_back(json{{"coeffs", put(f.monic)}, {"d", put(f.d)}, {"e", put(f.e)}});
        lemma["factorization"] = json{{"unit", put(cert.factorization->unit)}, {"factors", factors}};
    }
    if (cert.lemma) {
        lemma["cond_i"] = cert.lemma->cond_i;
        lemma["cond_ii"] = cert.lemma->cond_ii;
    }

    json torsion;
    if (cert.torsion_dimension) {
        torsion["dimension"] = *cert.torsion_dimension;
        torsion["quadratics"] = json::array();
        for (const auto& q : cert.torsion_quadratics) torsion["quadratics"].push_back(put(q));
    }

    json quotients;
    if (cert.q1) quotients["e1"] = put(*cert.q1);
    if (cert.q2) quotients["e2"] = put(*cert.q2);
    if (cert.jrank.rank) quotients["jacobian_rank"] = *cert.jrank.rank;
    quotients["jacobian_rank_provenance"] = cert.jrank.provenance;

    json mu_part;
    mu_part["generators"] = nlohmann::json::array();
    mu_part["images"] = nlohmann::json::array();
    for (const auto& g : cert.generators) mu_part["generators"].push_back(put(g));
    for (const auto& im : cert.generator_images) mu_part["images"].push_back(put(im));

    json kernel;
    if (cert.kernel) {
        kernel["expected_rank"] = cert.kernel->expected_rank;
        kernel["image_rank"] = cert.kernel->image_rank;
        kernel["verdict"] = cert.kernel->verdict;
    }

    json verdicts{{"everywhere_locally_solvable", cert.everywhere_locally_solvable},
                  {"no_rational_deg1_class", cert.no_rational_deg1_class},
                  {"satisfies_prop_1_3", cert.satisfies_prop_1_3}};

    return json{{"schema_version", cert.schema_version},
                {"curve", curve},
                {"local", local},
                {"lemma", lemma},
                {"torsion", torsion},
                {"quotients", quotients},
                {"mu", mu_part},
                {"kernel", kernel},
                {"verdicts", verdicts},
                {"assumptions", cert.assumptions},
                {"meta", json{{"tool", kToolName},
                              {"version", kToolVersion},
                              {"elapsed_ms", cert.elapsed_ms},
                              {"height_bound", cert.height_bound}}}};
}

inline CurveCertificate certificate_from_json(const nlohmann::json& j) {
    using namespace cert_json;
    CurveCertificate cert;
    try {
        cert.schema_version = j.at("schema_version").get<int>();
        if (cert.schema_version != kSchemaVersion)
            throw input_error("unsupported schema version " + std::to_string(cert.schema_version));
        const auto& curve = j.at("curve");
        for (int i = 0; i < 7; ++i)
            cert.coeffs[size_t(6 - i)] = get_rat(curve.at("coefficients").at(size_t(i)));
        cert.disc = get_rat(curve.at("discriminant"));
        if (curve.contains("family"))
            cert.family = std::pair<Integer, Integer>{get_int(curve.at("family").at("p")),
                                                      get_int(curve.at("family").at("a"))};

        const auto& local = j.at("local");
        cert.local.everywhere_solvable = local.at("solvable").get<bool>();
        cert.local.skipped_justification = local.at("skipped_places").get<std::string>();
        for (const auto& r : local.at("reports")) cert.local.reports.push_back(get_report(r));

        const auto& lemma = j.at("lemma");
        cert.factorization_supported = lemma.at("supported").get<bool>();
        if (lemma.contains("note")) cert.factorization_note = lemma.at("note").get<std::string>();
        if (lemma.contains("factorization")) {
            FactoredSextic fs;
            fs.unit = get_rat(lemma.at("factorization").at("unit"));
            for (const auto& f : lemma.at("factorization").at("factors")) {
                IrreducibleFactor fac;
                fac.monic = get_poly(f.at("coeffs"));
                fac.d = get_int(f.at("d"));
                fac.e = get_rat(f.at("e"));
                fs.factors.push_back(std::move(fac));
            }
            cert.factorization = std::move(fs);
        }
        if (lemma.contains("cond_i"))
            cert.lemma = LemmaConditions{lemma.at("cond_i").get<bool>(), lemma.at("cond_ii").get<bool>()};

        const auto& torsion = j.at("torsion");
        if (torsion.contains("dimension")) {
            cert.torsion_dimension = torsion.at("dimension").get<int>();
            for (const auto& q : torsion.at("quadratics"))
                cert.torsion_quadratics.push_back(get_poly(q));
        }

        const auto& quotients = j.at("quotients");
        if (quotients.contains("e1")) cert.q1 = get_quotient(quotients.at("e1"));
        if (quotients.contains("e2")) cert.q2 = get_quotient(quotients.at("e2"));
        if (quotients.contains("jacobian_rank")) cert.jrank.rank = quotients.at("jacobian_rank").get<int>();
        cert.jrank.provenance = quotients.at("jacobian_rank_provenance").get<std::string>();

        Genus2Curve model = make_curve(cert.coeffs);
        for (const auto& g : j.at("mu").at("generators"))
            cert.generators.push_back(get_divisor(g, model));
        for (const auto& im : j.at("mu").at("images"))
            cert.generator_images.push_back(get_boolean(im));

        const auto& kernel = j.at("kernel");
        if (kernel.contains("verdict"))
            cert.kernel = KernelCertificate{kernel.at("expected_rank").get<int>(),
                                            kernel.at("image_rank").get<int>(),
                                            kernel.at("verdict").get<bool>()};

        const auto& verdicts = j.at("verdicts");
        cert.everywhere_locally_solvable = verdicts.at("everywhere_locally_solvable").get<bool>();
        cert.no_rational_deg1_class = verdicts.at("no_rational_deg1_class").get<bool>();
        cert.satisfies_prop_1_3 = verdicts.at("satisfies_prop_1_3").get<bool>();

        for (const auto& a : j.at("assumptions")) cert.assumptions.push_back(a.get<std::string>());
        cert.elapsed_ms = j.at("meta").at("elapsed_ms").get<long>();
        cert.height_bound = j.at("meta").at("height_bound").get<long>();
    } catch (const input_error&) {
        throw;
    } catch (const nlohmann::json::out_of_range& e) {
        throw input_error(std::string("certificate field missing: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("certificate malformed: ") + e.what());
    }
    return cert;
}

inline void emit_certificate(const CurveCertificate& cert, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write certificate to " + path);
    out << certificate_to_json(cert).dump(2) << "\n";
    if (!out) throw input_error("write failure on " + path);
}

inline CurveCertificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read certificate from " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("certificate parse error in ") + path + ": " + e.what());
    }
    return certificate_from_json(j);
}

}  // namespace sectobs
