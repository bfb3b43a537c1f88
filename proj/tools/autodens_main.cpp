#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "autodens/dfao.hpp"
#include "autodens/exact_density.hpp"
#include "autodens/extremal.hpp"
#include "autodens/mullner.hpp"
#include "autodens/structure.hpp"
#include "autodens/subseq.hpp"
#include "autodens/verify.hpp"

namespace {

using nlohmann::json;
using namespace autodens;

json rj(const Rat& r) { return rat_str(r); }

json table_json(const std::map<std::string, Rat>& t) {
    json o = json::object();
    for (auto& [k, v] : t) o[k] = rj(v);
    return o;
}

json loglin_json(const LogLin& x) {
    json terms = json::array();
    for (auto& [c, arg] : x.terms) terms.push_back(json::array({rat_str(c), rat_str(arg)}));
    return json{{"c0", rat_str(x.c0)},
                {"terms", terms},
                {"base", x.base},
                {"enclosure", json::array({rat_str(x.enclosure.lo), rat_str(x.enclosure.hi)})},
                {"exact", x.exact}};
}

json report_json(const DensityReport& rep) {
    json log = json::object();
    for (auto& [k, v] : rep.log_table) log[k] = loglin_json(v);
    json natural{{"exists", rep.natural_exists}};
    if (rep.natural_exists) natural["table"] = table_json(rep.natural_table);
    if (rep.witness) {
        natural["witness"] = json{{"component_a", rep.witness->comp_a},
                                  {"component_b", rep.witness->comp_b},
                                  {"alpha", rep.witness->alpha},
                                  {"value_a", rj(rep.witness->value_a)},
                                  {"value_b", rj(rep.witness->value_b)}};
    }
    json comps = json::array();
    for (size_t i = 0; i < rep.component_tables.size(); ++i)
        comps.push_back(json{{"index", i + 1},
                             {"table", table_json(rep.component_tables[i])},
                             {"logdensity", loglin_json(rep.component_logdensities[i])}});
    json out{{"along", rep.along.describe()},
             {"log", log},
             {"natural", natural},
             {"components", comps},
             {"notes", rep.notes}};
    if (rep.natural_exists) out["table"] = table_json(rep.natural_table);
    return out;
}

void print_table_text(std::ostream& os, const DensityReport& rep) {
    os << "along " << rep.along.describe() << "\n";
    os << "logarithmic densities (always exist):\n";
    for (auto& [k, v] : rep.log_table)
        os << "  " << k << " in [" << rat_to_double(v.enclosure.lo) << ", "
           << rat_to_double(v.enclosure.hi) << "]"
           << (v.exact ? " (exact symbolic form)" : " (certified enclosure)") << "\n";
    if (rep.natural_exists) {
        os << "natural densities exist:\n";
        for (auto& [k, v] : rep.natural_table)
            os << "  " << k << " = " << rat_str(v) << "\n";
    } else {
        os << "natural densities do not exist";
        if (rep.witness)
            os << " (witness: component " << rep.witness->comp_a << " vs "
               << rep.witness->comp_b << " at " << rep.witness->alpha << ": "
               << rat_str(rep.witness->value_a) << " vs " << rat_str(rep.witness->value_b)
               << ")";
        os << "\n";
    }
    for (auto& n : rep.notes) os << "note: " << n << "\n";
}

struct Options {
    std::string file;
    std::string format = "json";
    std::string along_str = "naturals";
    std::string alpha;
    double tol = 0.01;
    std::uint64_t limit = 100000;
    bool log_mode = false;
};

int cmd_info(const Options& opt) {
    Dfao a = load_dfao(opt.file);
    Dfao m = minimize(a);
    StructureReport rep = analyze(normalize_zero(a));
    json finals = json::array();
    for (auto& f : rep.finals)
        finals.push_back(json{{"states", f.states},
                              {"column_number", f.column_number},
                              {"primitive", f.primitive},
                              {"minimal_images", f.min_images.size()},
                              {"one_orbit", f.strongly_connected_family}});
    json out{{"base", a.base},
             {"states", a.size()},
             {"initial", a.names[a.initial]},
             {"minimal_states", m.size()},
             {"already_minimal", m.size() == a.size()},
             {"prolongable", a.delta[a.initial][0] == a.initial},
             {"rebase_exponent", rep.ell},
             {"scc_count", rep.sccs.size()},
             {"final_components", finals}};
    if (opt.format == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "base " << a.base << ", " << a.size() << " states (minimal: "
                  << m.size() << "), initial " << a.names[a.initial] << "\n"
                  << "prolongable: " << (a.delta[a.initial][0] == a.initial ? "yes" : "no")
                  << ", contraction exponent " << rep.ell << "\n";
        for (size_t i = 0; i < rep.finals.size(); ++i)
            std::cout << "final component " << i + 1 << ": " << rep.finals[i].states.size()
                      << " states, column number " << rep.finals[i].column_number
                      << (rep.finals[i].primitive ? ", primitive" : "") << "\n";
    }
    return 0;
}

int cmd_decompose(const Options& opt) {
    Dfao a = load_dfao(opt.file);
    Decomposition dec = decompose(a);
    json comps = json::array();
    for (size_t i = 0; i < dec.components.size(); ++i) {
        const auto& comp = dec.components[i];
        std::string bpath = opt.file + ".b" + std::to_string(i + 1);
        std::string mpath = opt.file + ".m" + std::to_string(i + 1);
        std::ofstream(bpath) << serialize_dfao(comp.b);
        Dfao ind = dec.indicator(static_cast<int>(i) + 1);
        std::ofstream(mpath) << serialize_dfao(ind);
        GeneratorReport gens = generators(ind, 6);
        json gpreview = json::array();
        for (size_t k = 0; k < gens.gens.size() && k < 12; ++k) gpreview.push_back(gens.gens[k]);
        comps.push_back(json{{"index", i + 1},
                             {"final_component", comp.final_index + 1},
                             {"anchor", dec.rebased.names[comp.anchor]},
                             {"automaton", bpath},
                             {"membership", mpath},
                             {"generator_preview", gpreview},
                             {"generators_finite", gens.finite},
                             {"zero_in_set", gens.zero_in_s}});
    }
    std::string rpath = opt.file + ".m0";
    std::ofstream(rpath) << serialize_dfao(dec.residual_indicator());
    json out{{"base", dec.K},
             {"rebase_exponent", dec.ell},
             {"components", comps},
             {"residual", rpath}};
    if (opt.format == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "rebased to base " << dec.K << " (exponent " << dec.ell << "), "
                  << dec.components.size() << " component(s)\n";
        for (auto& c : comps)
            std::cout << "  component " << c["index"] << ": anchor " << c["anchor"]
                      << " -> " << c["automaton"].get<std::string>() << ", membership "
                      << c["membership"].get<std::string>() << "\n";
        std::cout << "  residual membership -> " << rpath << "\n";
    }
    return 0;
}

int cmd_density(const Options& opt) {
    Dfao a = load_dfao(opt.file);
    Along along = parse_along(opt.along_str);
    DensityReport rep = density_along(a, along);
    if (opt.format == "json")
        std::cout << report_json(rep).dump(2) << "\n";
    else
        print_table_text(std::cout, rep);
    return 0;
}

json certificate_json(const ExtremalResult& r) {
    return json{{"value", rj(r.value)},
                {"preperiod", r.certificate.preperiod},
                {"period", r.certificate.period},
                {"N", rj(r.certificate.N)},
                {"D", rj(r.certificate.D)},
                {"theta", rj(r.certificate.theta)},
                {"inner_optimum_zero", r.certificate.inner_optimum_zero}};
}

int cmd_extremal(const Options& opt) {
    Dfao a = load_dfao(opt.file);
    Along along = parse_along(opt.along_str);
    if (opt.alpha.empty()) throw ParseError("extremal requires --alpha");
    ExtremalProblem p = build_problem(a, along, opt.alpha);
    ExtremalResult up = upper_density(p);
    ExtremalResult lo = lower_density(p);
    json out{{"along", along.describe()},
             {"alpha", opt.alpha},
             {"upper", rj(up.value)},
             {"lower", rj(lo.value)},
             {"certificate", json{{"upper", certificate_json(up)}, {"lower", certificate_json(lo)}}}};
    if (opt.format == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "upper density of " << opt.alpha << " along " << along.describe()
                  << " = " << rat_str(up.value) << "\n"
                  << "lower density = " << rat_str(lo.value) << "\n";
    }
    return 0;
}

int cmd_verify(const Options& opt) {
    Dfao a = load_dfao(opt.file);
    Along along = parse_along(opt.along_str);
    DensityReport rep = density_along(a, along);
    EmpiricalEstimate emp = empirical_density(a, along, opt.limit, opt.log_mode);
    Comparison cmp = compare(rep, emp, opt.tol, opt.log_mode);
    json lines = json::array();
    for (auto& l : cmp.lines)
        lines.push_back(json{{"alpha", l.alpha},
                             {"exact", l.exact_value},
                             {"radius", l.radius},
                             {"empirical", l.empirical},
                             {"pass", l.pass}});
    json out{{"along", along.describe()},
             {"terms", opt.limit},
             {"log_weighted", opt.log_mode},
             {"tolerance", cmp.tolerance},
             {"pass", cmp.pass},
             {"lines", lines}};
    if (opt.format == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto& l : cmp.lines)
            std::cout << (l.pass ? "PASS " : "FAIL ") << l.alpha << ": exact "
                      << l.exact_value << " (radius " << l.radius << ") vs empirical "
                      << l.empirical << "\n";
        std::cout << "verdict: " << (cmp.pass ? "PASS" : "FAIL") << " at tolerance "
                  << cmp.tolerance << " over " << opt.limit << " terms\n";
    }
    return cmp.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact densities of automatic sequences along naturals, primes, squares, "
                 "and coprime residue classes"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool with_along) {
        sub->add_option("file", opt.file, "automaton file")->required();
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        if (with_along)
            sub->add_option("--along", opt.along_str,
                            "naturals | primes | squares | coprime=M");
    };

    CLI::App* info = app.add_subcommand("info", "parse and structural summary");
    add_common(info, false);
    CLI::App* dec = app.add_subcommand("decompose", "write component/membership automata");
    add_common(dec, false);
    CLI::App* den = app.add_subcommand("density", "exact density report");
    add_common(den, true);
    den->add_flag("--log", opt.log_mode, "emphasize logarithmic values");
    CLI::App* ext = app.add_subcommand("extremal", "exact upper/lower densities");
    add_common(ext, true);
    ext->add_option("--alpha", opt.alpha, "output symbol");
    CLI::App* ver = app.add_subcommand("verify", "empirical comparison");
    add_common(ver, true);
    ver->add_flag("--log", opt.log_mode, "logarithmic weights");
    ver->add_option("--limit", opt.limit, "number of subsequence terms");
    ver->add_option("--tol", opt.tol, "comparison tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (info->parsed()) return cmd_info(opt);
        if (dec->parsed()) return cmd_decompose(opt);
        if (den->parsed()) return cmd_density(opt);
        if (ext->parsed()) return cmd_extremal(opt);
        if (ver->parsed()) return cmd_verify(opt);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
