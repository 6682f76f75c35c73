#pragma once

#include "hsara/instance.hpp"

namespace fixture {

// Six nodes laid out so the MST is 0-1, 1-2, 0-3, 3-4, 3-5 and the split of
// its preorder tour 0,1,2,3,4,5 is {1,2,3}, {4,5}.
inline hsara::Instance two_branch_instance() {
  hsara::Instance inst;
  inst.n = 5;
  inst.coords = {{0, 0}, {0, 10}, {0, 20}, {10, 0}, {20, 2}, {12, -8}};
  inst.travel_mean = hsara::euclidean_travel(inst.coords);
  inst.service_mean = {0, 40, 40, 40, 90, 90};
  inst.cancel_prob.assign(6, 0.0);
  return inst;
}

}  // namespace fixture
