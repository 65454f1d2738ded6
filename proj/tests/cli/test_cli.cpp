#include <gtest/gtest.h>

#include <string>

#include "../support/run.hpp"

using testing_support::RunResult;
using testing_support::slurp;
using testing_support::spit;
using testing_support::TempDir;

namespace {

const std::string kData = APD_DATA_DIR;

std::string data(const std::string& name) { return testing_support::quote(kData + "/" + name); }
std::string golden(const std::string& name) { return slurp(kData + "/golden/" + name); }
std::string q(const std::filesystem::path& p) { return testing_support::quote(p.string()); }

RunResult apd(const std::string& args) { return testing_support::run(APD_BINARY, args); }

}  // namespace

TEST(CliDecompose, TenAgentGolden) {
  const auto r = apd("decompose --treatment " + data("ten_agent_treatment.csv") + " --control " +
                     data("ten_agent_control.csv"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, golden("ten_agent_components.json"));
}

TEST(CliDecompose, ManyToOneGolden) {
  TempDir tmp;
  const auto r = apd("decompose --mode many-to-one --capacity 2 --treatment " +
                     data("m2o_treatment.csv") + " --control " + data("m2o_control.csv") +
                     " -o " + q(tmp / "c.json") + " --disagreement-output " + q(tmp / "d.csv"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(tmp / "c.json"), golden("m2o_components.json"));
  EXPECT_EQ(slurp(tmp / "d.csv"), golden("m2o_disagreement.csv"));

  const auto v = apd("validate --capacity 2 --components " + q(tmp / "c.json") +
                     " --disagreement " + q(tmp / "d.csv"));
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.out.find("\"pass\": true"), std::string::npos);
}

TEST(CliDecompose, IdenticalPlansWarn) {
  const auto r = apd("decompose --treatment " + data("ten_agent_control.csv") + " --control " +
                     data("ten_agent_control.csv"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("\"components\": []"), std::string::npos);
}

TEST(CliDecompose, DuplicatedAgentIsInfeasible) {
  TempDir tmp;
  spit(tmp / "t.csv", "a,b\n1,6\n1,7\n");
  const auto r = apd("decompose --treatment " + q(tmp / "t.csv") + " --control " +
                     data("ten_agent_control.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("agent 1"), std::string::npos) << r.err;
}

TEST(CliDecompose, ParseErrorNamesLine) {
  TempDir tmp;
  spit(tmp / "t.csv", "a,b\n1,6\n2,x\n");
  const auto r = apd("decompose --treatment " + q(tmp / "t.csv") + " --control " +
                     data("ten_agent_control.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("t.csv:3:"), std::string::npos) << r.err;
}

TEST(CliRandomize, GoldenAssignment) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  const auto r = apd("randomize --components " + q(tmp / "c.json") + " --p 0.5 --seed 42");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, golden("ten_agent_assignment.json"));
}

TEST(CliRandomize, SeedRequired) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  const auto missing = apd("randomize --components " + q(tmp / "c.json") + " --p 0.5");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("--seed"), std::string::npos);
  const auto entropy =
      apd("randomize --components " + q(tmp / "c.json") + " --p 0.5 --allow-entropy");
  EXPECT_EQ(entropy.code, 0);
  EXPECT_NE(entropy.err.find("seed: "), std::string::npos);
}

TEST(CliRandomize, InvalidP) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  EXPECT_EQ(apd("randomize --components " + q(tmp / "c.json") + " --p 0 --seed 1").code, 2);
  EXPECT_EQ(apd("randomize --components " + q(tmp / "c.json") + " --p 1.5 --seed 1").code, 2);
}

TEST(CliRandomize, PMapIndexOutOfRange) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  spit(tmp / "p.json", R"({"7": 0.3})");
  const auto r = apd("randomize --components " + q(tmp / "c.json") + " --p 0.5 --seed 1 --p-map " +
                     q(tmp / "p.json"));
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST(CliRandomize, ThreadCountDoesNotChangeOutput) {
  TempDir tmp;
  std::string comps = R"({"mode":"one-to-one","capacity":1,"components":[)";
  for (int i = 0; i < 40; ++i) {
    const int a = 10 * i + 1;
    if (i > 0) comps += ",";
    comps += R"({"kind":"path","labels":["T","C","T"],"vertices":[)" + std::to_string(a) + "," +
             std::to_string(a + 1) + "," + std::to_string(a + 2) + "," + std::to_string(a + 3) +
             "]}";
  }
  comps += "]}";
  spit(tmp / "c.json", comps);
  const auto one = apd("randomize --components " + q(tmp / "c.json") +
                       " --p 0.4 --seed 99 --threads 1");
  const auto eight = apd("randomize --components " + q(tmp / "c.json") +
                         " --p 0.4 --seed 99 --threads 8");
  EXPECT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, eight.out);
}

TEST(CliEstimate, GoldenReport) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  spit(tmp / "a.json", golden("ten_agent_assignment.json"));
  const auto r = apd("estimate --components " + q(tmp / "c.json") + " --assignment " +
                     q(tmp / "a.json") + " --outcomes " + data("ten_agent_outcomes.csv") +
                     " --n 5 -o " + q(tmp / "r.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "tau_hat=1.200000 ci=[-0.720365,3.120365]\n");
  EXPECT_EQ(slurp(tmp / "r.json"), golden("ten_agent_report.json"));
}

TEST(CliEstimate, EmptyComponents) {
  TempDir tmp;
  spit(tmp / "c.json", R"({"mode":"one-to-one","capacity":1,"components":[]})");
  spit(tmp / "a.json", R"({"design":"AP","seed":1,"p":0.5,"p_map":{},"w":[]})");
  spit(tmp / "y.csv", "a,b,y\n");
  const auto r = apd("estimate --components " + q(tmp / "c.json") + " --assignment " +
                     q(tmp / "a.json") + " --outcomes " + q(tmp / "y.csv") + " --n 5 -o " +
                     q(tmp / "r.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "tau_hat=0.000000 ci=[0.000000,0.000000]\n");
}

TEST(CliEstimate, AdjacentSelectionsRejected) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  spit(tmp / "a.json", R"({"design":"AP","seed":1,"p":0.5,"p_map":{},"w":[[1,1,0,0],[0,0,0,0]]})");
  const auto r = apd("estimate --components " + q(tmp / "c.json") + " --assignment " +
                     q(tmp / "a.json") + " --outcomes " + data("ten_agent_outcomes.csv") +
                     " --n 5 -o " + q(tmp / "r.json"));
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST(CliEstimate, ShapeMismatchRejected) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  spit(tmp / "a.json", R"({"design":"AP","seed":1,"p":0.5,"p_map":{},"w":[[1,0,0,0]]})");
  const auto r = apd("estimate --components " + q(tmp / "c.json") + " --assignment " +
                     q(tmp / "a.json") + " --outcomes " + data("ten_agent_outcomes.csv") +
                     " --n 5 -o " + q(tmp / "r.json"));
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST(CliEstimate, MissingOutcome) {
  TempDir tmp;
  spit(tmp / "c.json", golden("ten_agent_components.json"));
  spit(tmp / "a.json", golden("ten_agent_assignment.json"));
  spit(tmp / "y.csv", "a,b,y\n1,6,1\n");
  const auto r = apd("estimate --components " + q(tmp / "c.json") + " --assignment " +
                     q(tmp / "a.json") + " --outcomes " + q(tmp / "y.csv") + " --n 5 -o " +
                     q(tmp / "r.json"));
  EXPECT_EQ(r.code, 5) << r.err;
}

TEST(CliOptimize, SingleCell) {
  const auto r = apd("optimize-p --kind path --length 5");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "kind,k,p_star,value_per_edge\npath,5,0.61551945,4.35963804\n");
  EXPECT_EQ(apd("optimize-p --kind cycle --length 5").code, 2);
}

TEST(CliOptimize, Table) {
  const auto r = apd("optimize-p --table");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, golden("optimal_table.csv"));
}

TEST(CliValidate, FailingDecompositionExitsThree) {
  TempDir tmp;
  spit(tmp / "d.csv", golden("m2o_disagreement.csv"));
  spit(tmp / "c.json", R"({"mode":"many-to-one","capacity":2,"components":[
    {"kind":"cycle","labels":["T","C","T","C"],"vertices":["s1","d1","s2","d3","s1"]},
    {"kind":"cycle","labels":["T","C","T","C"],"vertices":["s1","d1","s2","d3","s1"]}]})");
  const auto r = apd("validate --capacity 2 --components " + q(tmp / "c.json") +
                     " --disagreement " + q(tmp / "d.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("\"pass\": false"), std::string::npos);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliSimulate, ThreadCountDoesNotChangeOutput) {
  TempDir tmp;
  const auto one = apd("simulate --config " + data("sim_cyclic.json") + " --seed 7 --threads 1 --qq " +
                       q(tmp / "q1.csv"));
  const auto eight = apd("simulate --config " + data("sim_cyclic.json") +
                         " --seed 7 --threads 8 --qq " + q(tmp / "q8.csv"));
  EXPECT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, eight.out);
  EXPECT_EQ(slurp(tmp / "q1.csv"), slurp(tmp / "q8.csv"));
  EXPECT_EQ(slurp(tmp / "q1.csv").rfind("empirical_q,normal_q\n", 0), 0u);
  EXPECT_NE(one.out.find("\"note\": \"synthetic surrogate\""), std::string::npos);
}

TEST(CliSimulate, SeedRequired) {
  EXPECT_EQ(apd("simulate --config " + data("sim_cyclic.json")).code, 2);
}

TEST(CliGeneral, UnknownSubcommand) {
  EXPECT_EQ(apd("frobnicate").code, 2);
  EXPECT_EQ(apd("estimate --components x.json").code, 2);
}
