#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = WFBENCH_BIN;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "wfbench_cli_test";
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = kBin + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint64_t fnv1a64(const unsigned char* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

TEST_CASE("generate + evaluate round trip with exit codes") {
  TempDir dir;
  const std::string graph = dir.file("g36.wfg");
  CHECK(run_cli("generate --preset circle-k3-m6 --out " + graph) == 0);

  CHECK(run_cli("evaluate --graph " + graph +
                " --potential builtin:unifying --c 3 --require-perfect") == 0);

  // a three-row form cannot be perfect at c = 3
  const std::string spec = dir.file("h3.json");
  {
    std::ofstream out(spec);
    out << R"({"kind":"canonical","n":3,"index_matrix":[[1,2,3],[-1,2,3],[-2,-2,3]],)"
        << R"("coefs":[0,0,0]})";
  }
  CHECK(run_cli("evaluate --graph " + graph + " --potential " + spec +
                " --c 3 --require-perfect") == 1);
  // without the gate it reports and exits clean
  CHECK(run_cli("evaluate --graph " + graph + " --potential " + spec + " --c 3") == 0);
}

TEST_CASE("usage and I/O error exit codes") {
  TempDir dir;
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("generate") == 2);  // --out is required
  CHECK(run_cli("evaluate --graph " + dir.file("missing.wfg") +
                " --potential builtin:sum") == 3);
  CHECK(run_cli("generate --preset bogus --out " + dir.file("x.wfg")) == 3);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("preset regeneration is byte-identical") {
  TempDir dir;
  const std::string a = dir.file("a.wfg");
  const std::string b = dir.file("b.wfg");
  REQUIRE(run_cli("generate --preset circle-k3-m6 --out " + a) == 0);
  REQUIRE(run_cli("generate --preset circle-k3-m6 --out " + b) == 0);
  CHECK(read_bytes(a) == read_bytes(b));
}

TEST_CASE("verify re-derives edges and names the first mismatch") {
  TempDir dir;
  const std::string graph = dir.file("g12.wfg");
  REQUIRE(run_cli("generate --k 1 --m 2 --single-start --out " + graph) == 0);
  CHECK(run_cli("verify --graph " + graph) == 0);

  // flip one grad byte and re-seal the checksum so only verify can notice
  auto bytes = read_bytes(graph);
  const std::size_t grad_off = 44 + 16 + 18 + 10;  // header, nodes, edge 0, grad of edge 1
  REQUIRE(grad_off + 4 < bytes.size());
  bytes[grad_off] = 3;  // stored grad was 2
  const std::uint64_t sum = fnv1a64(bytes.data(), bytes.size() - 8);
  for (std::size_t i = 0; i < 8; ++i)
    bytes[bytes.size() - 8 + i] = (sum >> (8 * i)) & 0xFF;
  {
    std::ofstream out(graph, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  const std::string cmd = kBin + " verify --graph " + graph + " > " + dir.file("out.txt") +
                          " 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 1);
  std::ifstream in(dir.file("out.txt"));
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("mismatch at edge 1") != std::string::npos);

  // without the reseal the checksum rejects the file outright
  bytes[grad_off] = 4;
  {
    std::ofstream out(graph, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run_cli("verify --graph " + graph) == 3);
}

TEST_CASE("certify emits a loadable psi file") {
  TempDir dir;
  const std::string graph = dir.file("g.wfg");
  const std::string psi = dir.file("psi.json");
  REQUIRE(run_cli("generate --k 2 --m 4 --all-starts --out " + graph) == 0);
  CHECK(run_cli("certify --graph " + graph + " --c 2 --emit-psi " + psi) == 0);
  std::ifstream in(psi);
  REQUIRE(in.good());
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("c") == "2");
  CHECK(j.at("scale") == 1);
  CHECK(j.at("psi").is_array());
}

TEST_CASE("evaluate writes a machine-readable report") {
  TempDir dir;
  const std::string graph = dir.file("g.wfg");
  const std::string report = dir.file("report.json");
  REQUIRE(run_cli("generate --preset circle-k3-m6 --out " + graph) == 0);
  CHECK(run_cli("evaluate --graph " + graph +
                " --potential builtin:huang-zhang-k3 --c 3 --with-bellman --report " +
                report) == 0);
  std::ifstream in(report);
  REQUIRE(in.good());
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("violations_k") == 0);
  CHECK(j.at("instance").at("k") == 3);
  CHECK(j.at("bellman_node_corr").is_number());

  // restricted-form gate: huang-zhang passes, unifying does not
  CHECK(run_cli("evaluate --graph " + graph +
                " --potential builtin:huang-zhang-k3 --c 3 --require-restricted-form") == 0);
  CHECK(run_cli("evaluate --graph " + graph +
                " --potential builtin:unifying --c 3 --require-restricted-form") == 3);
}

TEST_CASE("search subcommand writes an outcome file") {
  TempDir dir;
  const std::string graph = dir.file("g.wfg");
  const std::string outcome = dir.file("outcome.json");
  REQUIRE(run_cli("generate --k 2 --m 4 --all-starts --out " + graph) == 0);
  CHECK(run_cli("search --graph " + graph +
                " --seed-potential builtin:unifying --c 2 --family staged "
                "--budget-evals 20 --proxy-sample 30 --rng 5 --out " +
                outcome) == 0);
  std::ifstream in(outcome);
  REQUIRE(in.good());
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("report").at("violations_k").is_number());
  CHECK(j.at("history").is_array());
  CHECK(j.at("best").at("kind") == "canonical");

  CHECK(run_cli("search --graph " + graph +
                " --seed-potential builtin:sum --c 2 --family staged --budget-evals 5") ==
        2);  // staged needs a canonical seed
}

TEST_CASE("report subcommand emits shortfall CSV") {
  TempDir dir;
  const std::string graph = dir.file("g.wfg");
  const std::string csv = dir.file("edges.csv");
  REQUIRE(run_cli("generate --k 1 --m 2 --out " + graph) == 0);
  CHECK(run_cli("report --graph " + graph + " --potential builtin:sum --c 1 --csv " +
                csv) == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "edge_id,u,r,v,grad,dopt,weight_c,shortfall");
}
