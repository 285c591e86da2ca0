#pragma once

#include <cctype>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "mml/io.hpp"
#include "mml/parse.hpp"

namespace mml::cli {

// Subcommand front end. All output is deterministic: machine mode prints one
// JSON document per run, --pretty switches to short human-readable text.
// Exit codes: 0 success / nothing found, 1 refutation or failed checks,
// 2 domain error (with an error JSON on stdout), 64 usage error.

constexpr int exit_ok = 0;
constexpr int exit_refuted = 1;
constexpr int exit_error = 2;
constexpr int exit_usage = 64;

/// Replace the well-known formula names (com_l, com_r, casari, bd_k) by
/// their parenthesized expansions wherever they occur as whole words, before
/// any parsing.
inline std::string expand_named_formulas(const std::string& text) {
	auto word_char = [](char c) {
		return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
	};
	std::string out;
	std::size_t i = 0;
	while (i < text.size()) {
		bool boundary = out.empty() || !word_char(out.back());
		std::string_view rest = std::string_view(text).substr(i);
		if (boundary) {
			auto whole = [&](std::string_view name) {
				return rest.substr(0, name.size()) == name &&
				       (rest.size() == name.size() || !word_char(rest[name.size()]));
			};
			Formula expansion;
			std::size_t used = 0;
			if (whole("com_l")) {
				expansion = mk_com_l();
				used = 5;
			} else if (whole("com_r")) {
				expansion = mk_com_r();
				used = 5;
			} else if (whole("casari")) {
				expansion = mk_casari();
				used = 6;
			} else if (rest.substr(0, 3) == "bd_") {
				std::size_t k = 3;
				while (k < rest.size() && k < 9 &&
				       std::isdigit(static_cast<unsigned char>(rest[k])))
					++k;
				if (k > 3 && (k == rest.size() || !word_char(rest[k]))) {
					int n = std::stoi(std::string(rest.substr(3, k - 3)));
					if (n >= 1) {
						expansion = mk_bd(n);
						used = k;
					}
				}
			}
			if (used > 0) {
				out += "(" + to_string(expansion) + ")";
				i += used;
				continue;
			}
		}
		out += text[i];
		++i;
	}
	return out;
}

/// A --formula argument: literal text, or @path to read it from a file.
inline Formula formula_arg(std::string spec) {
	if (!spec.empty() && spec[0] == '@') {
		spec = read_file(spec.substr(1));
		while (!spec.empty() && std::isspace(static_cast<unsigned char>(spec.back())))
			spec.pop_back();
	}
	return parse(expand_named_formulas(spec));
}

namespace detail {

inline std::string witness_text(const TwoFrame& f, const std::map<std::string, Bits>& val,
                                int world) {
	std::string s = "world " + f.worlds[world];
	for (const auto& [var, set] : val) {
		s += ", " + var + "={";
		bool first = true;
		set.for_each([&](int i) {
			if (!first) s += ",";
			s += f.worlds[i];
			first = false;
		});
		s += "}";
	}
	return s;
}

inline void emit(std::ostream& out, const json& j, bool pretty,
                 const std::string& pretty_text) {
	if (pretty)
		out << pretty_text;
	else
		out << j.dump() << "\n";
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
	CLI::App app{"workbench for bimodal frames, translations, and countermodel search",
	             "mml"};
	app.require_subcommand(1);

	std::string frame_path, model_path, formula_text, logic_text, suite, dot_path;
	std::string variant_text;
	std::vector<std::string> product_frames;
	int max_size = 0, cap = 0;
	std::uint64_t budget = 0;
	bool pretty = false, modulo_iso = false;

	auto add_common = [&](CLI::App* cmd) {
		cmd->add_flag("--pretty", pretty, "human-readable output instead of JSON");
		cmd->add_option("--dot", dot_path, "also write the resulting frame as DOT");
		cmd->add_option("--budget", budget, "override the work budget");
	};

	CLI::App* validate = app.add_subcommand(
	    "validate", "check a formula against a frame (all valuations) or one model");
	validate->add_option("--frame", frame_path, "frame file (JSON)");
	validate->add_option("--model", model_path, "model file (JSON)");
	validate->add_option("--formula", formula_text, "formula text or @file")->required();
	add_common(validate);

	CLI::App* counter = app.add_subcommand(
	    "countermodel", "search a frame class for a refuting model");
	counter->add_option("--formula", formula_text, "formula text or @file")->required();
	counter->add_option("--logic", logic_text, "frame class, e.g. MGrzB[2]")->required();
	counter->add_option("--max-size", max_size, "largest carrier to try")->required();
	add_common(counter);

	CLI::App* filtrate = app.add_subcommand(
	    "filtrate", "shrink a refuting model to a bounded-depth one");
	filtrate->add_option("--model", model_path, "model file (JSON)")->required();
	filtrate->add_option("--formula", formula_text, "formula text or @file")->required();
	filtrate
	    ->add_option("--variant", variant_text, "one of MGrz, MGrzB, MPlusGrzB, MGLB")
	    ->required();
	add_common(filtrate);

	CLI::App* translate =
	    app.add_subcommand("translate", "print the splitting translation of a formula");
	translate->add_option("--formula", formula_text, "formula text or @file")->required();
	translate->add_flag("--pretty", pretty, "no effect; the output is already text");

	CLI::App* product_cmd = app.add_subcommand(
	    "product", "product of a unimodal frame with an equivalence frame");
	product_cmd
	    ->add_option("--frame", product_frames, "left then right frame file (twice)")
	    ->required();
	add_common(product_cmd);

	CLI::App* enumerate = app.add_subcommand(
	    "enumerate", "count the frames of a class by carrier size");
	enumerate->add_option("--logic", logic_text, "frame class, e.g. MGrzB[2]")->required();
	enumerate->add_option("--max-size", max_size, "largest carrier to count")->required();
	enumerate->add_option("--cap", cap, "carrier size cap (default 5)");
	enumerate->add_flag("--modulo-iso", modulo_iso, "count isomorphism classes only");
	enumerate->add_flag("--pretty", pretty, "human-readable output instead of JSON");
	enumerate->add_option("--budget", budget, "override the work budget");

	CLI::App* skeleton_cmd =
	    app.add_subcommand("skeleton", "collapse a frame's E-clusters to points");
	skeleton_cmd->add_option("--frame", frame_path, "frame file (JSON)")->required();
	add_common(skeleton_cmd);

	CLI::App* verify = app.add_subcommand(
	    "verify-theorems", "exhaustively check one registered fact suite");
	verify->add_option("--suite", suite, "suite name")->required();
	verify->add_option("--cap", cap, "largest carrier to sweep (default 3)");
	verify->add_flag("--pretty", pretty, "human-readable output instead of JSON");
	verify->add_option("--budget", budget, "override the work budget");

	std::reverse(args.begin(), args.end());
	try {
		app.parse(args);
	} catch (const CLI::CallForHelp&) {
		out << app.help();
		return exit_ok;
	} catch (const CLI::CallForAllHelp&) {
		out << app.help("", CLI::AppFormatMode::All);
		return exit_ok;
	} catch (const CLI::ParseError& e) {
		err << e.what() << "\n";
		return exit_usage;
	}

	auto write_dot = [&](const TwoFrame& f) {
		if (!dot_path.empty()) write_file(dot_path, frame_to_dot(f));
	};

	try {
		if (validate->parsed()) {
			if (frame_path.empty() == model_path.empty()) {
				err << "validate needs exactly one of --frame or --model\n";
				return exit_usage;
			}
			Formula phi = formula_arg(formula_text);
			if (!frame_path.empty()) {
				TwoFrame f = load_frame(frame_path);
				write_dot(f);
				auto ce = find_refutation(f, phi, budget ? budget : (1ull << 22));
				json j{{"command", "validate"},
				       {"formula", to_string(phi)},
				       {"status", ce ? "refuted" : "valid"}};
				std::string text;
				if (ce) {
					j["witness"] = {{"frame", frame_to_json(f)},
					                {"valuation", valuation_to_json(f, ce->valuation)},
					                {"world", f.worlds[ce->world]}};
					text = "refuted at " +
					       detail::witness_text(f, ce->valuation, ce->world) + "\n";
				} else {
					text = "valid on the frame (" + std::to_string(f.size()) +
					       " worlds, all valuations)\n";
				}
				detail::emit(out, j, pretty, text);
				return ce ? exit_refuted : exit_ok;
			}
			Model m = load_model(model_path);
			write_dot(m.frame);
			Bits truths = truth_set(m, phi);
			json names = json::array();
			truths.for_each([&](int i) { names.push_back(m.frame.worlds[i]); });
			bool everywhere = truths == Bits::full(m.frame.size());
			json j{{"command", "validate"},
			       {"formula", to_string(phi)},
			       {"truth_set", names},
			       {"holds_everywhere", everywhere}};
			std::string text = everywhere ? "holds at every world\n" : "holds at:";
			if (!everywhere) {
				truths.for_each([&](int i) { text += " " + m.frame.worlds[i]; });
				text += "\n";
			}
			detail::emit(out, j, pretty, text);
			return everywhere ? exit_ok : exit_refuted;
		}

		if (counter->parsed()) {
			Formula phi = formula_arg(formula_text);
			LogicId logic = parse_logic_id(logic_text);
			SearchOutcome o =
			    countermodel(phi, logic, max_size, budget ? budget : enumeration_budget);
			std::string text;
			if (o.status == SearchStatus::refuted) {
				write_dot(o.witness->frame);
				text = "refuted on " + frame_summary(o.witness->frame) + " at " +
				       detail::witness_text(o.witness->frame, o.witness->valuation,
				                            o.witness->world) +
				       "\nexamined " + std::to_string(o.frames_examined) + " frames\n";
			} else {
				text = "no countermodel up to " + std::to_string(o.bound) +
				       " worlds (examined " + std::to_string(o.frames_examined) +
				       " frames)\n";
			}
			detail::emit(out, outcome_to_json(o), pretty, text);
			return o.status == SearchStatus::refuted ? exit_refuted : exit_ok;
		}

		if (filtrate->parsed()) {
			Model m = load_model(model_path);
			Formula phi = formula_arg(formula_text);
			FiltrationReport rep =
			    run_filtration(m, phi, parse_variant(variant_text), budget);
			write_dot(rep.result.frame);
			bool ok = rep.checks.all();
			std::string text = to_string(rep.variant) + ": " +
			                   std::to_string(rep.points.size()) + " points, depth " +
			                   std::to_string(rep.result_depth) + " (bound " +
			                   std::to_string(rep.depth_bound) + "), checks " +
			                   (ok ? "passed" : "FAILED") + "\n";
			detail::emit(out, report_to_json(m, rep), pretty, text);
			return ok ? exit_ok : exit_refuted;
		}

		if (translate->parsed()) {
			out << to_string(boxplus_translate(formula_arg(formula_text))) << "\n";
			return exit_ok;
		}

		if (product_cmd->parsed()) {
			if (product_frames.size() != 2) {
				err << "product needs --frame twice: left factor, right factor\n";
				return exit_usage;
			}
			TwoFrame prod =
			    product(load_frame(product_frames[0]), load_frame(product_frames[1]));
			write_dot(prod);
			detail::emit(out, frame_to_json(prod), pretty, frame_summary(prod) + "\n");
			return exit_ok;
		}

		if (enumerate->parsed()) {
			LogicId logic = parse_logic_id(logic_text);
			json by_size = json::array();
			std::uint64_t total = 0;
			std::string text;
			for (int s = 1; s <= max_size; ++s) {
				std::uint64_t count =
				    enumerate_frames(s, logic, modulo_iso, cap ? cap : default_size_cap,
				                     budget ? budget : enumeration_budget)
				        .size();
				total += count;
				by_size.push_back({{"size", s}, {"count", count}});
				text += "size " + std::to_string(s) + ": " + std::to_string(count) + "\n";
			}
			json j{{"logic", to_string(logic)},
			       {"max_size", max_size},
			       {"modulo_iso", modulo_iso},
			       {"by_size", by_size},
			       {"total", total}};
			detail::emit(out, j, pretty, text + "total: " + std::to_string(total) + "\n");
			return exit_ok;
		}

		if (skeleton_cmd->parsed()) {
			TwoFrame f = load_frame(frame_path);
			write_dot(f);
			json j = skeleton_to_json(f);
			std::string text;
			for (std::size_t c = 0; c < j["classes"].size(); ++c) {
				text += "class " + std::to_string(c) + ":";
				for (const auto& w : j["classes"][c]) text += " " + w.get<std::string>();
				text += "\n";
			}
			text += "edges:";
			for (const auto& edge : j["edges"])
				text += " " + std::to_string(edge[0].get<int>()) + ">" +
				        std::to_string(edge[1].get<int>());
			text += "\n";
			detail::emit(out, j, pretty, text);
			return exit_ok;
		}

		// verify-theorems
		SuiteReport rep =
		    verify_theorem_suite(suite, cap ? cap : 3, budget ? budget : enumeration_budget);
		std::string text = rep.suite + " cap=" + std::to_string(rep.cap) + " cases=" +
		                   std::to_string(rep.cases) + ": " +
		                   std::to_string(rep.counterexamples.size()) + " counterexamples\n";
		for (const std::string& c : rep.counterexamples) text += "  " + c + "\n";
		detail::emit(out, suite_report_to_json(rep), pretty, text);
		return rep.ok() ? exit_ok : exit_refuted;
	} catch (const error& e) {
		out << error_to_json(e).dump() << "\n";
		err << e.what() << "\n";
		return exit_error;
	}
}

} // namespace mml::cli
