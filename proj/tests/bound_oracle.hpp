#pragma once

// Frozen oracle endpoints for the elastic bound program,
// computed offline with an independent LP solver (HiGHS).

namespace oracle {

struct BoundInstance {
  double s0, s1, s_nt1, s_at0;
  double s_ct[3][2];  // [type][z]
  double n_t[3];
  double r_t[3];
  int n;
  double lower[3], upper[3];
  bool feasible[3];
};

inline constexpr BoundInstance kBoundInstances[] = {
    {5.0, 15.0, 4.0, 3.0,
     {{1.0, 3.0}, {4.0, 8.0}, {0.0, 4.0}},
     {8.0, 10.0, 5.0},
     {2.0, 2.0, 1.0}, 23,
     {0.25, 0.30000000000000004, 0.6000000000000001},
     {0.375, 0.5, 1.0},
     {true, true, true}},
    {8.0, 12.0, 5.0, 2.0,
     {{4.0, 5.0}, {2.0, 5.0}, {2.0, 2.0}},
     {7.0, 5.0, 3.0},
     {0.0, 2.0, 2.0}, 15,
     {0.1428571428571428, 0.4, 0.0},
     {0.1428571428571428, 0.6, 0.33333333333333337},
     {true, true, true}},
    {12.0, 14.0, 3.0, 7.0,
     {{2.0, 2.0}, {5.0, 6.0}, {5.0, 6.0}},
     {4.0, 8.0, 5.0},
     {1.0, 2.0, 2.0}, 17,
     {0.25, 0.0, 0.0},
     {0.25, 0.125, 0.19999999999999996},
     {false, false, false}},
    {8.0, 16.0, 9.0, 1.0,
     {{3.0, 8.0}, {1.0, 4.0}, {4.0, 4.0}},
     {11.0, 6.0, 6.0},
     {1.0, 0.0, 1.0}, 23,
     {0.4545454545454546, 0.5, 0.0},
     {0.4545454545454546, 0.5, 0.0},
     {true, true, true}},
    {16.0, 19.0, 6.0, 7.0,
     {{5.0, 7.0}, {7.0, 8.0}, {4.0, 4.0}},
     {7.0, 11.0, 7.0},
     {4.0, 5.0, 2.0}, 25,
     {0.0, 0.0, 0.0},
     {0.42857142857142855, 0.2727272727272727, 0.2857142857142857},
     {true, true, true}},
    {7.0, 16.0, 7.0, 3.0,
     {{3.0, 7.0}, {4.0, 6.0}, {0.0, 3.0}},
     {8.0, 5.0, 8.0},
     {3.0, 3.0, 3.0}, 21,
     {0.375, 0.0, 0.125},
     {0.75, 0.3999999999999999, 0.75},
     {false, false, false}},
    {11.0, 12.0, 2.0, 3.0,
     {{2.0, 3.0}, {3.0, 3.0}, {6.0, 6.0}},
     {5.0, 3.0, 8.0},
     {1.0, 1.0, 1.0}, 16,
     {0.0, 0.0, 0.0},
     {0.2, 0.0, 0.125},
     {true, true, true}},
    {9.0, 15.0, 4.0, 3.0,
     {{2.0, 3.0}, {3.0, 6.0}, {4.0, 6.0}},
     {5.0, 8.0, 9.0},
     {2.0, 2.0, 2.0}, 22,
     {0.0, 0.125, 0.0},
     {0.6000000000000001, 0.5, 0.4444444444444445},
     {true, true, true}},
    {13.0, 16.0, 5.0, 6.0,
     {{5.0, 7.0}, {5.0, 6.0}, {3.0, 3.0}},
     {7.0, 13.0, 4.0},
     {2.0, 3.0, 1.0}, 24,
     {0.0, 0.07692307692307698, 0.0},
     {0.28571428571428564, 0.23076923076923073, 0.25},
     {true, true, true}},
    {3.0, 6.0, 2.0, 1.0,
     {{1.0, 2.0}, {0.0, 1.0}, {2.0, 3.0}},
     {2.0, 5.0, 4.0},
     {2.0, 3.0, 3.0}, 11,
     {0.0, 0.0, 0.0},
     {1.0, 0.6000000000000001, 0.75},
     {true, true, true}},
    {9.0, 11.0, 2.0, 3.0,
     {{2.0, 2.0}, {3.0, 4.0}, {4.0, 5.0}},
     {3.0, 6.0, 6.0},
     {1.0, 1.0, 0.0}, 15,
     {0.0, 0.16666666666666663, 0.16666666666666663},
     {0.0, 0.16666666666666663, 0.16666666666666663},
     {true, true, true}},
    {12.0, 16.0, 4.0, 2.0,
     {{2.0, 2.0}, {1.0, 2.0}, {9.0, 12.0}},
     {5.0, 4.0, 10.0},
     {2.0, 1.0, 3.0}, 19,
     {0.0, 0.0, 0.10000000000000009},
     {0.4, 0.25, 0.3999999999999999},
     {false, false, false}},
    {8.0, 13.0, 3.0, 1.0,
     {{4.0, 4.0}, {1.0, 3.0}, {3.0, 6.0}},
     {4.0, 3.0, 8.0},
     {1.0, 0.0, 1.0}, 15,
     {0.0, 0.6666666666666667, 0.375},
     {0.0, 0.6666666666666667, 0.375},
     {true, true, true}},
    {4.0, 8.0, 1.0, 0.0,
     {{1.0, 2.0}, {0.0, 1.0}, {3.0, 5.0}},
     {1.0, 2.0, 6.0},
     {1.0, 1.0, 0.0}, 9,
     {0.0, 1.0, 0.33333333333333326},
     {0.0, 1.0, 0.33333333333333326},
     {false, false, false}},
    {4.0, 8.0, 2.0, 1.0,
     {{3.0, 3.0}, {0.0, 0.0}, {1.0, 5.0}},
     {4.0, 1.0, 5.0},
     {1.0, 1.0, 0.0}, 10,
     {0.0, 0.0, 0.8},
     {0.0, 0.0, 0.8},
     {true, true, true}},
    {8.0, 11.0, 5.0, 3.0,
     {{2.0, 5.0}, {3.0, 3.0}, {3.0, 3.0}},
     {6.0, 4.0, 7.0},
     {1.0, 1.0, 2.0}, 17,
     {0.33333333333333326, 0.0, 0.0},
     {0.49999999999999994, 0.25, 0.14285714285714285},
     {true, true, true}},
    {6.0, 12.0, 6.0, 2.0,
     {{4.0, 7.0}, {1.0, 3.0}, {1.0, 2.0}},
     {9.0, 4.0, 5.0},
     {1.0, 1.0, 0.0}, 18,
     {0.3333333333333333, 0.5, 0.2},
     {0.3333333333333333, 0.5, 0.2},
     {true, true, true}},
    {7.0, 11.0, 7.0, 0.0,
     {{5.0, 7.0}, {0.0, 2.0}, {2.0, 2.0}},
     {9.0, 3.0, 8.0},
     {1.0, 2.0, 2.0}, 20,
     {0.11111111111111094, 0.0, 0.0},
     {0.33333333333333326, 1.0, 0.25},
     {true, true, true}},
    {10.0, 17.0, 10.0, 3.0,
     {{6.0, 10.0}, {3.0, 4.0}, {1.0, 3.0}},
     {11.0, 6.0, 4.0},
     {1.0, 2.0, 2.0}, 21,
     {0.2727272727272728, 0.0, 0.0},
     {0.4545454545454546, 0.5, 1.0},
     {true, true, true}},
    {5.0, 11.0, 2.0, 3.0,
     {{0.0, 2.0}, {3.0, 5.0}, {2.0, 4.0}},
     {5.0, 4.0, 8.0},
     {2.0, 1.0, 1.0}, 17,
     {0.4, 0.25, 0.375},
     {0.4, 0.25, 0.375},
     {false, false, false}},
    {11.0, 12.0, 15.0, 4.0,
     {{1.0, 1.0}, {5.0, 6.0}, {5.0, 5.0}},
     {3.0, 5.0, 7.0},
     {1.0, 1.0, 1.0}, 15,
     {0.0, 0.0, 0.0},
     {0.3333333333333333, 0.19999999999999996, 0.1428571428571428},
     {false, false, false}},
    {9.0, 14.0, 18.0, 3.0,
     {{1.0, 1.0}, {3.0, 6.0}, {5.0, 7.0}},
     {4.0, 6.0, 9.0},
     {2.0, 3.0, 1.0}, 19,
     {0.25, 0.0, 0.11111111111111105},
     {0.75, 0.33333333333333326, 0.33333333333333326},
     {false, false, false}},
    {11.0, 17.0, 19.0, 3.0,
     {{4.0, 5.0}, {6.0, 9.0}, {1.0, 3.0}},
     {10.0, 8.0, 6.0},
     {4.0, 4.0, 0.0}, 24,
     {0.19999999999999996, 0.125, 0.33333333333333337},
     {0.29999999999999993, 0.25, 0.33333333333333337},
     {false, false, false}},
    {5.0, 7.0, 10.0, 2.0,
     {{0.0, 2.0}, {2.0, 2.0}, {3.0, 3.0}},
     {3.0, 5.0, 5.0},
     {2.0, 2.0, 1.0}, 13,
     {0.6666666666666667, 0.0, 0.0},
     {0.6666666666666667, 0.0, 0.0},
     {false, false, false}},
};

}  // namespace oracle
