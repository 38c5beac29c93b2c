#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mpclo/io.h"
#include "mpclo/partition.h"
#include "test_support.h"

namespace mpclo {
namespace {

// Set MPCLO_UPDATE_GOLDEN=1 to rewrite the stored file after an intended change.
void compare_with_golden(const std::string& name, const std::string& actual) {
  const std::string path = std::string(MPCLO_GOLDEN_DIR) + "/" + name;
  if (std::getenv("MPCLO_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    GTEST_SKIP() << "rewrote " << path;
  }
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << "missing " << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), actual);
}

TEST(Golden, SquareLpPartitionCsv) {
  GridSpec g;
  g.side = Side::kDualThetaD;
  g.rectangle = {{-1, 1}, {-1, 1}};
  g.resolution = 9;
  PartitionOptions opt;
  opt.curvature = false;
  compare_with_golden("square_lp_9.csv", io::partition_csv(classify_grid(test::square_lp(), g, opt)));
}

}  // namespace
}  // namespace mpclo
