#include "sectobs/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace sectobs;

CurveInput parse_curve_flags(const std::string& family, const std::string& coeffs) {
    CurveInput input;
    if (!family.empty() && !coeffs.empty())
        throw input_error("give either --family or --coeffs, not both");
    if (!family.empty()) {
        auto comma = family.find(',');
        if (comma == std::string::npos) throw input_error("--family expects p,a");
        input.family = std::pair<Integer, Integer>{Integer(family.substr(0, comma)),
                                                   Integer(family.substr(comma + 1))};
        return input;
    }
    if (coeffs.empty()) throw input_error("one of --family or --coeffs is required");
    std::array<Rational, 7> f{};
    std::string rest = coeffs;
    for (int i = 6; i >= 0; --i) {  // input order f6,...,f0
        auto comma = rest.find(',');
        std::string tok = comma == std::string::npos ? rest : rest.substr(0, comma);
        if (tok.empty() || (comma == std::string::npos && i != 0))
            throw input_error("--coeffs expects 7 comma-separated values f6,...,f0");
        f[size_t(i)] = parse_rational(tok);
        rest = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
    }
    input.coeffs = f;
    return input;
}

void print_certificate_summary(const CurveCertificate& cert) {
    auto yesno = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "model: Y^2 =";
    for (int i = 6; i >= 0; --i) {
        if (cert.coeffs[size_t(i)] == 0) continue;
        std::cout << " " << (i == 6 ? "" : "+ ") << "(" << to_string(cert.coeffs[size_t(i)]) << ")";
        if (i > 0) std::cout << "*X^" << i;
    }
    std::cout << "\n";
    if (cert.family)
        std::cout << "family parameters: p = " << cert.family->first << ", a = " << cert.family->second
                  << "\n";
    std::cout << "everywhere locally solvable: " << yesno(cert.everywhere_locally_solvable) << "\n";
    for (const auto& r : cert.local.reports)
        if (!r.solvable) std::cout << "  local failure at " << r.place.str() << "\n";
    if (cert.lemma)
        std::cout << "root conditions (i), (ii): " << yesno(cert.lemma->cond_i) << ", "
                  << yesno(cert.lemma->cond_ii) << "\n";
    else
        std::cout << "factorization: " << cert.factorization_note << "\n";
    if (cert.torsion_dimension)
        std::cout << "2-torsion dimension: " << *cert.torsion_dimension << "\n";
    for (const QuotientData* q : {cert.q1 ? &*cert.q1 : nullptr, cert.q2 ? &*cert.q2 : nullptr}) {
        if (!q) continue;
        std::cout << "quotient rank: ";
        if (q->descent && q->descent->certified_rank)
            std::cout << *q->descent->certified_rank << " (certified, Sha[2] dim "
                      << *q->descent->sha2_dim << ")";
        else if (q->descent)
            std::cout << "in [" << q->descent->rank_lower << ", " << q->descent->rank_upper
                      << "] (uncertified)";
        else
            std::cout << "unavailable" << (q->note.empty() ? "" : " (" + q->note + ")");
        std::cout << "\n";
    }
    if (cert.jrank.rank) std::cout << "Jacobian rank: " << *cert.jrank.rank << "\n";
    if (cert.kernel)
        std::cout << "mu image rank: " << cert.kernel->image_rank << " of " << cert.kernel->expected_rank
                  << " (kernel = 2J: " << yesno(cert.kernel->verdict) << ")\n";
    std::cout << "no rational degree-1 divisor class: " << yesno(cert.no_rational_deg1_class) << "\n";
    std::cout << "satisfies the local-global section obstruction chain: "
              << yesno(cert.satisfies_prop_1_3) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"certifies genus-2 curves Y^2 = F(X) as Hasse-principle counterexamples "
                 "without a rational degree-1 divisor class"};
    app.require_subcommand(1);

    std::string family, coeffs, out_file;
    long height_bound = 10000;
    auto* analyze_cmd = app.add_subcommand("analyze", "analyze one curve and emit its certificate");
    analyze_cmd->add_option("--family", family, "family parameters p,a");
    analyze_cmd->add_option("--coeffs", coeffs, "sextic coefficients f6,f5,f4,f3,f2,f1,f0");
    analyze_cmd->add_option("--height-bound", height_bound, "point search bound on x = m/n^2");
    analyze_cmd->add_option("--out", out_file, "write the certificate JSON here");

    Integer pmax = 50, amin = -20, amax = 20;
    int jobs = 2;
    std::string cache_dir, out_dir;
    long search_height = 10000;
    auto* search_cmd = app.add_subcommand("search", "sweep the family over p and a");
    search_cmd->add_option("--pmax", [&pmax](const std::vector<std::string>& v) {
        pmax = Integer(v.at(0));
        return true;
    }, "largest prime p");
    search_cmd->add_option("--amin", [&amin](const std::vector<std::string>& v) {
        amin = Integer(v.at(0));
        return true;
    }, "smallest a");
    search_cmd->add_option("--amax", [&amax](const std::vector<std::string>& v) {
        amax = Integer(v.at(0));
        return true;
    }, "largest a");
    search_cmd->add_option("--jobs", jobs, "parallel workers");
    search_cmd->add_option("--cache", cache_dir, "certificate cache directory (or SECTOBS_CACHE)");
    search_cmd->add_option("--out", out_dir, "write per-pair certificates into this directory");
    search_cmd->add_option("--height-bound", search_height, "point search bound per quotient");

    std::string verify_path;
    auto* verify_cmd = app.add_subcommand("verify", "re-validate an emitted certificate");
    verify_cmd->add_option("file", verify_path, "certificate JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze_cmd->parsed()) {
        CurveCertificate cert = analyze(parse_curve_flags(family, coeffs), AnalyzeOptions{height_bound});
        print_certificate_summary(cert);
        if (!out_file.empty()) {
            emit_certificate(cert, out_file);
            std::cout << "certificate written to " << out_file << "\n";
        }
        return 0;
    }
    if (search_cmd->parsed()) {
        SearchOptions opts;
        opts.jobs = jobs;
        opts.cache_dir = cache_dir;
        opts.out_dir = out_dir;
        opts.height_bound = search_height;
        std::vector<SearchRow> rows = search_family(pmax, amin, amax, opts);
        int certified = 0;
        for (const auto& row : rows) {
            std::cout << row.p << " " << row.a << " " << to_string(row.status) << "\n";
            if (row.status == SearchStatus::certified) ++certified;
        }
        std::cout << "certified pairs: " << certified << " of " << rows.size() << "\n";
        return 0;
    }
    CurveCertificate cert = load_certificate(verify_path);
    std::vector<std::string> failures = verify_certificate(cert);
    if (failures.empty()) {
        std::cout << "certificate re-validates\n";
        return 0;
    }
    for (const auto& f : failures) std::cout << "FAIL: " << f << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sectobs::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const sectobs::internal_defect& e) {
        std::cerr << "internal defect: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
