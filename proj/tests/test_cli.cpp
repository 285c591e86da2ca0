#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mml/cli.hpp"

using namespace mml;

namespace {

struct RunResult {
	int code = -1;
	std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
	std::ostringstream out, err;
	RunResult r;
	r.code = cli::run(std::move(args), out, err);
	r.out = out.str();
	r.err = err.str();
	return r;
}

struct TempFile {
	std::string path;

	TempFile(const std::string& name, const std::string& text)
	    : path("cli_test_" + name) {
		write_file(path, text);
	}
	~TempFile() { std::remove(path.c_str()); }
};

const char* d2_text = R"({"worlds":["x","y"],"R":[["x","x"],["x","y"],["y","y"]],"E":[["x","y"]]})";

} // namespace

TEST_CASE("translate prints the splitting translation") {
	RunResult r = run_cli({"translate", "--formula", "[]p"});
	REQUIRE(r.code == 0);
	REQUIRE(r.out == "p & []p\n");
}

TEST_CASE("named formulas expand anywhere a formula is read") {
	REQUIRE(cli::expand_named_formulas("casari") == "(" + to_string(mk_casari()) + ")");
	REQUIRE(cli::expand_named_formulas("bd_2 -> bd_1") ==
	        "(" + to_string(mk_bd(2)) + ") -> (" + to_string(mk_bd(1)) + ")");
	REQUIRE(cli::expand_named_formulas("p & com_r") ==
	        "p & (" + to_string(mk_com_r()) + ")");
	// not whole words: left alone
	REQUIRE(cli::expand_named_formulas("pcasari") == "pcasari");
	REQUIRE(cli::expand_named_formulas("bd_") == "bd_");
	REQUIRE(cli::expand_named_formulas("bd_0") == "bd_0");

	RunResult r = run_cli({"translate", "--formula", "casari"});
	REQUIRE(r.code == 0);
	REQUIRE(r.out == to_string(boxplus_translate(mk_casari())) + "\n");

	RunResult bad = run_cli({"translate", "--formula", "bd_0"});
	REQUIRE(bad.code == 2);
	REQUIRE(bad.out.find("SyntaxError") != std::string::npos);
}

TEST_CASE("formula arguments load from files with @") {
	TempFile file("formula.txt", "<>p -> p\n");
	RunResult r = run_cli({"translate", "--formula", "@" + file.path});
	REQUIRE(r.code == 0);
	REQUIRE(r.out == to_string(boxplus_translate(parse("<>p -> p"))) + "\n");
}

TEST_CASE("validate reports a refutation on the dirty cluster") {
	TempFile frame("d2.json", d2_text);
	RunResult r = run_cli({"validate", "--frame", frame.path, "--formula", "casari"});
	REQUIRE(r.code == 1);
	json j = json::parse(r.out);
	REQUIRE(j["status"] == "refuted");
	REQUIRE(j["command"] == "validate");

	// the serialized witness re-validates through an independent check
	Model m;
	m.frame = frame_from_json(j["witness"]["frame"]);
	for (const auto& [var, worlds] : j["witness"]["valuation"].items()) {
		Bits set(m.frame.size());
		for (const auto& w : worlds) set.set(m.frame.require_world(w.get<std::string>()));
		m.valuation[var] = set;
	}
	int world = m.frame.require_world(j["witness"]["world"].get<std::string>());
	REQUIRE(!satisfies(m, world, mk_casari()));
}

TEST_CASE("validate reports validity with exit zero") {
	TempFile frame("d2.json", d2_text);
	RunResult r = run_cli({"validate", "--frame", frame.path, "--formula", "bd_2"});
	REQUIRE(r.code == 0);
	REQUIRE(json::parse(r.out)["status"] == "valid");

	RunResult pretty = run_cli(
	    {"validate", "--frame", frame.path, "--formula", "bd_2", "--pretty"});
	REQUIRE(pretty.out == "valid on the frame (2 worlds, all valuations)\n");
}

TEST_CASE("validate evaluates formulas on a fixed model") {
	TempFile model("d2_model.json",
	               R"({"worlds":["x","y"],"R":[["x","x"],["x","y"],["y","y"]],)"
	               R"("E":[["x","y"]],"valuation":{"p":["y"]}})");
	RunResult holds = run_cli({"validate", "--model", model.path, "--formula", "Ep"});
	REQUIRE(holds.code == 0);
	REQUIRE(json::parse(holds.out)["holds_everywhere"] == true);

	RunResult partial = run_cli({"validate", "--model", model.path, "--formula", "p"});
	REQUIRE(partial.code == 1);
	REQUIRE(json::parse(partial.out)["truth_set"] == json::array({"y"}));
}

TEST_CASE("validate wants exactly one input") {
	TempFile frame("d2.json", d2_text);
	REQUIRE(run_cli({"validate", "--formula", "p"}).code == 64);
	REQUIRE(run_cli({"validate", "--frame", frame.path, "--model", frame.path,
	                 "--formula", "p"})
	            .code == 64);
	REQUIRE(run_cli({"validate", "--frame", frame.path}).code == 64);
}

TEST_CASE("countermodel finds the dirty cluster and exits one") {
	RunResult r = run_cli({"countermodel", "--formula", "casari", "--logic", "MGrzB",
	                       "--max-size", "2"});
	REQUIRE(r.code == 1);
	json j = json::parse(r.out);
	REQUIRE(j["status"] == "refuted");
	REQUIRE(j["frames_examined"] == 3);
	REQUIRE(j["witness"]["world"] == "w0");
}

TEST_CASE("countermodel reports validity up to the bound with exit zero") {
	RunResult r = run_cli({"countermodel", "--formula", "casari", "--logic",
	                       "MPlusGrzB", "--max-size", "3"});
	REQUIRE(r.code == 0);
	REQUIRE(json::parse(r.out)["status"] == "valid_up_to_bound");
	REQUIRE(!json::parse(r.out).contains("witness"));
}

TEST_CASE("domain errors exit two with a structured JSON") {
	RunResult bad_logic = run_cli({"countermodel", "--formula", "p", "--logic", "XYZ",
	                               "--max-size", "2"});
	REQUIRE(bad_logic.code == 2);
	REQUIRE(json::parse(bad_logic.out)["error"] == "UnknownLogic");
	REQUIRE(!bad_logic.err.empty());

	RunResult tiny = run_cli({"countermodel", "--formula", "casari", "--logic", "MGrzB",
	                          "--max-size", "3", "--budget", "10"});
	REQUIRE(tiny.code == 2);
	REQUIRE(json::parse(tiny.out)["error"] == "BudgetExceeded");
}

TEST_CASE("filtrate shrinks a refuting model and reports its checks") {
	TempFile model("d2_model.json",
	               R"({"worlds":["x","y"],"R":[["x","x"],["x","y"],["y","y"]],)"
	               R"("E":[["x","y"]],"valuation":{"p":["y"]}})");
	RunResult r = run_cli({"filtrate", "--model", model.path, "--formula", "casari",
	                       "--variant", "MGrzB"});
	REQUIRE(r.code == 0);
	json j = json::parse(r.out);
	REQUIRE(j["variant"] == "MGrzB");
	REQUIRE(j["checks"]["all"] == true);

	RunResult pretty = run_cli({"filtrate", "--model", model.path, "--formula",
	                            "casari", "--variant", "MGrzB", "--pretty"});
	REQUIRE(pretty.out.find("checks passed") != std::string::npos);

	RunResult not_refuted = run_cli({"filtrate", "--model", model.path, "--formula",
	                                 "true", "--variant", "MGrzB"});
	REQUIRE(not_refuted.code == 2);
	REQUIRE(json::parse(not_refuted.out)["error"] == "NotRefuted");
}

TEST_CASE("product multiplies a chain with a cluster") {
	TempFile left("chain2.json", R"({"worlds":["a","b"],"R":[["a","b"]]})");
	TempFile right("cluster2.json",
	               R"({"worlds":["u","v"],"R":[["u","u"],["u","v"],["v","u"],["v","v"]]})");
	RunResult r = run_cli({"product", "--frame", left.path, "--frame", right.path});
	REQUIRE(r.code == 0);
	TwoFrame prod = frame_from_json(json::parse(r.out));
	REQUIRE(prod.size() == 4);
	REQUIRE(prod.R.at(prod.require_world("(a,u)"), prod.require_world("(b,u)")));
	REQUIRE(prod.E.at(prod.require_world("(a,u)"), prod.require_world("(a,v)")));
	REQUIRE(!prod.R.at(prod.require_world("(a,u)"), prod.require_world("(b,v)")));

	REQUIRE(run_cli({"product", "--frame", left.path}).code == 64);
}

TEST_CASE("enumerate counts frames per size") {
	RunResult r = run_cli({"enumerate", "--logic", "MGrzB", "--max-size", "2"});
	REQUIRE(r.code == 0);
	json j = json::parse(r.out);
	REQUIRE(j["by_size"][0]["count"] == 1);
	REQUIRE(j["by_size"][1]["count"] == 6);
	REQUIRE(j["total"] == 7);

	RunResult iso = run_cli(
	    {"enumerate", "--logic", "MGrzB", "--max-size", "2", "--modulo-iso"});
	REQUIRE(json::parse(iso.out)["total"] == 5);

	RunResult pretty = run_cli(
	    {"enumerate", "--logic", "MGrzB", "--max-size", "2", "--pretty"});
	REQUIRE(pretty.out == "size 1: 1\nsize 2: 6\ntotal: 7\n");
}

TEST_CASE("skeleton collapses clusters") {
	TempFile frame("com3.json",
	               R"({"worlds":["x","y","z"],)"
	               R"("R":[["x","x"],["y","y"],["z","z"],["x","y"]],"E":[["y","z"]]})");
	RunResult r = run_cli({"skeleton", "--frame", frame.path});
	REQUIRE(r.code == 0);
	json j = json::parse(r.out);
	REQUIRE(j["classes"] == json::parse(R"([["x"],["y","z"]])"));
	REQUIRE(j["edges"] == json::parse(R"([[0,0],[0,1],[1,1]])"));
}

TEST_CASE("verify-theorems runs a suite and counts counterexamples") {
	RunResult r = run_cli({"verify-theorems", "--suite", "casari", "--cap", "3"});
	REQUIRE(r.code == 0);
	json j = json::parse(r.out);
	REQUIRE(j["ok"] == true);
	REQUIRE(j["counterexamples"] == json::array());

	RunResult pretty = run_cli(
	    {"verify-theorems", "--suite", "casari", "--cap", "3", "--pretty"});
	REQUIRE(pretty.out.find("0 counterexamples") != std::string::npos);

	RunResult unknown = run_cli({"verify-theorems", "--suite", "nonsense"});
	REQUIRE(unknown.code == 2);
	REQUIRE(json::parse(unknown.out)["error"] == "UnknownSuite");
}

TEST_CASE("dot files are written on request") {
	TempFile frame("d2.json", d2_text);
	std::string dot_path = "cli_test_out.dot";
	RunResult r = run_cli({"skeleton", "--frame", frame.path, "--dot", dot_path});
	REQUIRE(r.code == 0);
	std::string dot = read_file(dot_path);
	REQUIRE(dot.rfind("digraph frame {", 0) == 0);
	REQUIRE(dot.find("rank=same") != std::string::npos);
	std::remove(dot_path.c_str());
}

TEST_CASE("usage errors exit sixty-four") {
	REQUIRE(run_cli({}).code == 64);
	REQUIRE(run_cli({"frobnicate"}).code == 64);
	REQUIRE(run_cli({"translate"}).code == 64);
	REQUIRE(run_cli({"countermodel", "--formula", "p"}).code == 64);
	REQUIRE(run_cli({"translate", "--formula", "p", "--frobnicate"}).code == 64);
}

TEST_CASE("help is available and exits zero") {
	RunResult r = run_cli({"--help"});
	REQUIRE(r.code == 0);
	REQUIRE(r.out.find("countermodel") != std::string::npos);
	REQUIRE(r.out.find("verify-theorems") != std::string::npos);
}

TEST_CASE("output is byte identical across runs") {
	TempFile frame("d2.json", d2_text);
	std::vector<std::string> args = {"validate", "--frame", frame.path, "--formula",
	                                 "casari"};
	RunResult a = run_cli(args);
	RunResult b = run_cli(args);
	REQUIRE(a.out == b.out);
	REQUIRE(a.code == b.code);

	RunResult c = run_cli({"countermodel", "--formula", "com_r", "--logic", "MGrz",
	                       "--max-size", "3"});
	RunResult d = run_cli({"countermodel", "--formula", "com_r", "--logic", "MGrz",
	                       "--max-size", "3"});
	REQUIRE(c.out == d.out);
}
