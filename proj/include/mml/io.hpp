#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mml/decision.hpp"
#include "mml/errors.hpp"
#include "mml/filtration.hpp"
#include "mml/frame.hpp"
#include "mml/model.hpp"

namespace mml {

// JSON and DOT encodings of the library's structures. nlohmann::json keeps
// object keys sorted, so every encoder here is byte-deterministic.

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Writers.

/// Frame schema: {"worlds": [names], "R": [[from, to]], "E": [[a, b]]}.
/// E lists one pair per related couple a < b; the diagonal is implicit.
inline json frame_to_json(const TwoFrame& f) {
	json j;
	j["worlds"] = f.worlds;
	json r = json::array(), e = json::array();
	for (int i = 0; i < f.size(); ++i)
		for (int k = 0; k < f.size(); ++k) {
			if (f.R.at(i, k)) r.push_back({f.worlds[i], f.worlds[k]});
			if (i < k && f.E.at(i, k)) e.push_back({f.worlds[i], f.worlds[k]});
		}
	j["R"] = std::move(r);
	j["E"] = std::move(e);
	return j;
}

inline json valuation_to_json(const TwoFrame& f, const std::map<std::string, Bits>& val) {
	json v = json::object();
	for (const auto& [var, set] : val) {
		json names = json::array();
		set.for_each([&](int i) { names.push_back(f.worlds[i]); });
		v[var] = std::move(names);
	}
	return v;
}

/// Model schema: the frame schema plus {"valuation": {var: [names]}}.
inline json model_to_json(const Model& m) {
	json j = frame_to_json(m.frame);
	j["valuation"] = valuation_to_json(m.frame, m.valuation);
	return j;
}

inline json skeleton_to_json(const TwoFrame& f) {
	Skeleton sk = e_skeleton(f);
	json classes = json::array();
	for (const auto& members : sk.classes) {
		json cls = json::array();
		for (int i : members) cls.push_back(f.worlds[i]);
		classes.push_back(std::move(cls));
	}
	json edges = json::array();
	for (int a = 0; a < int(sk.classes.size()); ++a)
		for (int b = 0; b < int(sk.classes.size()); ++b)
			if (sk.R0.at(a, b)) edges.push_back({a, b});
	return json{{"classes", std::move(classes)}, {"edges", std::move(edges)}};
}

inline json outcome_to_json(const SearchOutcome& o) {
	json j;
	j["status"] = to_string(o.status);
	j["bound"] = o.bound;
	j["frames_examined"] = o.frames_examined;
	if (o.witness) {
		json w;
		w["frame"] = frame_to_json(o.witness->frame);
		w["valuation"] = valuation_to_json(o.witness->frame, o.witness->valuation);
		w["world"] = o.witness->frame.worlds[o.witness->world];
		j["witness"] = std::move(w);
	}
	return j;
}

inline json checks_to_json(const FiltrationChecks& c) {
	return json{{"truth_lemma", c.truth_lemma},
	            {"target_class", c.target_class},
	            {"skeleton_depth", c.skeleton_depth},
	            {"cluster_chains", c.cluster_chains},
	            {"total_depth", c.total_depth},
	            {"e_matches_source", c.e_matches_source},
	            {"r_within_q", c.r_within_q},
	            {"r_edge_shape", c.r_edge_shape},
	            {"injective_sources", c.injective_sources},
	            {"all", c.all()}};
}

inline json report_to_json(const Model& source, const FiltrationReport& rep) {
	json j;
	j["variant"] = to_string(rep.variant);
	j["subformula_count"] = rep.subformula_count;
	j["result_depth"] = rep.result_depth;
	j["depth_bound"] = rep.depth_bound;
	j["model"] = model_to_json(rep.result);
	json points = json::array();
	for (const HattedPoint& p : rep.points) {
		json names = json::array();
		p.provenance.for_each([&](int i) { names.push_back(source.frame.worlds[i]); });
		points.push_back({{"source", source.frame.worlds[p.source]},
		                  {"rule", p.rule},
		                  {"provenance", std::move(names)}});
	}
	j["points"] = std::move(points);
	json log = json::array();
	for (std::size_t i = 0; i < rep.log.size(); ++i) {
		const StepLogEntry& s = rep.log[i];
		log.push_back({{"step", i},
		               {"rule", s.rule},
		               {"detail", s.detail},
		               {"at", s.at},
		               {"witness", s.witness},
		               {"introduced", s.introduced}});
	}
	j["log"] = std::move(log);
	j["checks"] = checks_to_json(rep.checks);
	return j;
}

inline json suite_report_to_json(const SuiteReport& rep) {
	return json{{"suite", rep.suite},
	            {"cap", rep.cap},
	            {"cases", rep.cases},
	            {"counterexamples", rep.counterexamples},
	            {"ok", rep.ok()}};
}

inline json error_to_json(const error& e) {
	json j{{"error", errc_name(e.code())}, {"message", e.what()}};
	if (e.offset() != error::npos) j["offset"] = e.offset();
	return j;
}

// ---------------------------------------------------------------------------
// Readers. Unknown keys are rejected so typos fail loudly.

namespace detail {

inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& what) {
	if (!j.is_object()) fail(errc::bad_input, what + ": expected a JSON object");
	for (const auto& [key, value] : j.items()) {
		(void)value;
		if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
			fail(errc::bad_input, what + ": unknown key '" + key + "'");
	}
}

inline bool valid_variable(const std::string& s) {
	if (s.empty() || s[0] != 'p') return false;
	for (std::size_t i = 1; i < s.size(); ++i)
		if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
	return true;
}

inline std::vector<std::pair<std::string, std::string>> pair_list(const json& j,
                                                                  const std::string& what) {
	if (!j.is_array()) fail(errc::bad_input, what + ": expected an array of pairs");
	std::vector<std::pair<std::string, std::string>> out;
	for (const json& p : j) {
		if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
			fail(errc::bad_input, what + ": each pair must be [from, to]");
		out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
	}
	return out;
}

} // namespace detail

/// Reads the frame schema. "worlds" and "R" are required; "E" may be omitted
/// for the identity. E is closed to the least equivalence over the listed
/// pairs; R is taken verbatim.
inline TwoFrame frame_from_json(const json& j) {
	detail::check_keys(j, {"worlds", "R", "E"}, "frame");
	if (!j.contains("worlds")) fail(errc::bad_input, "frame: missing key 'worlds'");
	if (!j.contains("R")) fail(errc::bad_input, "frame: missing key 'R'");
	if (!j["worlds"].is_array()) fail(errc::bad_input, "frame: 'worlds' must be an array");
	std::vector<std::string> worlds;
	for (const json& w : j["worlds"]) {
		if (!w.is_string()) fail(errc::bad_input, "frame: world names must be strings");
		worlds.push_back(w.get<std::string>());
	}
	auto r = detail::pair_list(j["R"], "frame R");
	auto e = j.contains("E") ? detail::pair_list(j["E"], "frame E")
	                         : std::vector<std::pair<std::string, std::string>>{};
	return make_frame(worlds, r, e);
}

inline Model model_from_json(const json& j) {
	detail::check_keys(j, {"worlds", "R", "E", "valuation"}, "model");
	json frame_part = j;
	frame_part.erase("valuation");
	Model m;
	m.frame = frame_from_json(frame_part);
	if (j.contains("valuation")) {
		if (!j["valuation"].is_object())
			fail(errc::bad_input, "model: 'valuation' must be an object");
		for (const auto& [var, worlds] : j["valuation"].items()) {
			if (!detail::valid_variable(var))
				fail(errc::bad_input, "model: bad variable name '" + var + "'");
			if (!worlds.is_array())
				fail(errc::bad_input, "model: valuation of '" + var +
				                          "' must be an array of world names");
			Bits set(m.frame.size());
			for (const json& w : worlds) {
				if (!w.is_string())
					fail(errc::bad_input, "model: world names must be strings");
				set.set(m.frame.require_world(w.get<std::string>()));
			}
			m.valuation[var] = set;
		}
	}
	return m;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
	json j = json::parse(text, nullptr, false);
	if (j.is_discarded()) fail(errc::bad_input, what + ": not valid JSON");
	return j;
}

inline std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) fail(errc::bad_input, "cannot read file: " + path);
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

inline TwoFrame load_frame(const std::string& path) {
	return frame_from_json(parse_json_text(read_file(path), path));
}

inline Model load_model(const std::string& path) {
	return model_from_json(parse_json_text(read_file(path), path));
}

// ---------------------------------------------------------------------------
// DOT export: R edges run vertically (rankdir=BT), each E-cluster sits on one
// rank joined by dashed lines. Reflexive points get a double border instead
// of a self loop.

inline std::string frame_to_dot(const TwoFrame& f) {
	std::ostringstream out;
	out << "digraph frame {\n\trankdir=BT;\n\tnode [shape=circle];\n";
	for (int i = 0; i < f.size(); ++i) {
		out << "\t\"" << f.worlds[i] << "\"";
		if (f.R.at(i, i)) out << " [peripheries=2]";
		out << ";\n";
	}
	Skeleton sk = e_skeleton(f);
	for (const auto& members : sk.classes) {
		if (members.size() < 2) continue;
		out << "\t{ rank=same;";
		for (int i : members) out << " \"" << f.worlds[i] << "\";";
		out << " }\n";
		for (std::size_t k = 0; k + 1 < members.size(); ++k)
			out << "\t\"" << f.worlds[members[k]] << "\" -> \"" << f.worlds[members[k + 1]]
			    << "\" [style=dashed, dir=none, constraint=false];\n";
	}
	for (int i = 0; i < f.size(); ++i)
		for (int k = 0; k < f.size(); ++k)
			if (i != k && f.R.at(i, k))
				out << "\t\"" << f.worlds[i] << "\" -> \"" << f.worlds[k] << "\";\n";
	out << "}\n";
	return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
	std::ofstream out(path, std::ios::binary);
	if (!out) fail(errc::bad_input, "cannot write file: " + path);
	out << text;
}

} // namespace mml
