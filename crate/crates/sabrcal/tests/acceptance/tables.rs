//! Frozen reference values backing the acceptance suite: the two benchmark
//! parameter cases with their price tables, the lognormal limit case table
//! with analytic payoff variances, and the market smile section with its
//! published Hagan calibrations.
//!
//! Prices are undiscounted, carry no accrual factor and are quoted in
//! shifted-rate units; errors are three standard deviations of the mean.

use sabrcal::SabrParams;

pub const CASE1: SabrParams = SabrParams {
    f0: 1.0,
    lambda: 0.03,
    alpha: 0.1178,
    beta: 0.8738,
    rho: -0.0702,
    nu: 0.5010,
};

pub const CASE2: SabrParams = SabrParams {
    f0: 1.0,
    lambda: 0.03,
    alpha: 0.1822,
    beta: 0.3044,
    rho: 0.1243,
    nu: 0.3127,
};

/// (K, floorlet, floorlet_err3, caplet, caplet_err3).
pub type PriceRow = (f64, f64, f64, f64, f64);

pub const CASE1_T2: [PriceRow; 10] = [
    (0.5, 0.00063, 0.00006, 0.50045, 0.00057),
    (0.6, 0.00177, 0.00005, 0.40159, 0.00056),
    (0.7, 0.00476, 0.00009, 0.30458, 0.00054),
    (0.8, 0.01249, 0.00014, 0.21231, 0.00051),
    (0.9, 0.03132, 0.00022, 0.13114, 0.00045),
    (1.0, 0.07070, 0.00031, 0.07052, 0.00038),
    (1.1, 0.13494, 0.00040, 0.03476, 0.00030),
    (1.2, 0.21742, 0.00046, 0.01724, 0.00023),
    (1.3, 0.30925, 0.00050, 0.00907, 0.00018),
    (1.4, 0.40530, 0.00052, 0.00511, 0.00015),
];

pub const CASE1_T10: [PriceRow; 10] = [
    (0.5, 0.02865, 0.00030, 0.52680, 0.00349),
    (0.6, 0.04096, 0.00038, 0.43911, 0.00347),
    (0.7, 0.05776, 0.00046, 0.35590, 0.00346),
    (0.8, 0.08130, 0.00055, 0.27944, 0.00344),
    (0.9, 0.11498, 0.00064, 0.21312, 0.00342),
    (1.0, 0.16260, 0.00073, 0.16074, 0.00340),
    (1.1, 0.22549, 0.00081, 0.12357, 0.00337),
    (1.2, 0.30054, 0.00088, 0.09868, 0.00335),
    (1.3, 0.38368, 0.00093, 0.08183, 0.00333),
    (1.4, 0.47181, 0.00098, 0.06995, 0.00332),
];

/// (K, floorlet, floorlet_err3, caplet, caplet_err3, var_flo, var_cap);
/// the variance columns are the closed-form payoff variances.
pub type BlackRow = (f64, f64, f64, f64, f64, f64, f64);

/// Lognormal limit case: T=2, beta=1, rho=0, nu=0, alpha as tabulated.
pub const BLACK_LIMIT: [(f64, [BlackRow; 7]); 3] = [
    (
        0.1,
        [
            (0.7, 0.00030, 0.00001, 0.30026, 0.00043, 0.00002, 0.02123),
            (0.8, 0.00361, 0.00005, 0.20357, 0.00041, 0.00029, 0.01967),
            (0.9, 0.01904, 0.00013, 0.11900, 0.00036, 0.00190, 0.01501),
            (1.0, 0.05806, 0.00023, 0.05802, 0.00027, 0.00614, 0.00855),
            (1.1, 0.12344, 0.00032, 0.02340, 0.00018, 0.01202, 0.00362),
            (1.2, 0.20796, 0.00038, 0.00792, 0.00010, 0.01693, 0.00120),
            (1.3, 0.30235, 0.00041, 0.00231, 0.00005, 0.01970, 0.00033),
        ],
    ),
    (
        0.3,
        [
            (0.7, 0.04281, 0.00026, 0.34263, 0.00121, 0.00811, 0.17180),
            (0.8, 0.07566, 0.00037, 0.27548, 0.00114, 0.01588, 0.15165),
            (0.9, 0.11929, 0.00048, 0.21912, 0.00106, 0.02668, 0.13021),
            (1.0, 0.17298, 0.00059, 0.17280, 0.00097, 0.04005, 0.10929),
            (1.1, 0.23559, 0.00069, 0.13541, 0.00088, 0.05518, 0.09009),
            (1.2, 0.30581, 0.00078, 0.10563, 0.00079, 0.07119, 0.07324),
            (1.3, 0.38232, 0.00087, 0.08214, 0.00071, 0.08727, 0.05893),
        ],
    ),
    (
        0.5,
        [
            (0.7, 0.11993, 0.00050, 0.41948, 0.00218, 0.02901, 0.55848),
            (0.8, 0.16827, 0.00061, 0.36783, 0.00211, 0.04376, 0.52047),
            (0.9, 0.22340, 0.00073, 0.32295, 0.00203, 0.06122, 0.48240),
            (1.0, 0.28448, 0.00083, 0.28403, 0.00195, 0.08089, 0.44533),
            (1.1, 0.35074, 0.00094, 0.25029, 0.00187, 0.10225, 0.40992),
            (1.2, 0.42144, 0.00104, 0.22100, 0.00179, 0.12480, 0.37658),
            (1.3, 0.49598, 0.00113, 0.19553, 0.00172, 0.14810, 0.34550),
        ],
    ),
];

// Market smile section: three maturities, thirteen strikes each, with the
// published Hagan fit next to the quoted vols.

pub const SMILE_TS: [f64; 3] = [1.5, 10.0, 30.0];
pub const SMILE_F0: [f64; 3] = [0.0228, 0.0266, 0.0156];
pub const SMILE_LAMBDA: f64 = 0.03;

pub const SMILE_STRIKES: [f64; 13] = [
    -0.015, -0.01, 0.0, 0.005, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.10,
];

/// Hagan-calibrated (alpha, beta, rho, nu) per maturity.
pub const HAGAN_THETA: [[f64; 4]; 3] = [
    [0.0225, 0.3510, -0.1232, 0.8969],
    [0.0209, 0.3369, 0.1572, 0.2758],
    [0.0172, 0.3343, 0.1262, 0.1730],
];

/// Quoted shifted-Black vols per maturity and strike.
pub const MARKET_VOLS: [[f64; 13]; 3] = [
    [
        0.5071, 0.4263, 0.3087, 0.2633, 0.2243, 0.1920, 0.1686, 0.1614, 0.1829, 0.2064, 0.2272,
        0.2451, 0.2866,
    ],
    [
        0.2767, 0.2427, 0.1976, 0.1822, 0.1703, 0.1614, 0.1551, 0.1485, 0.1473, 0.1487, 0.1512,
        0.1541, 0.1624,
    ],
    [
        0.2303, 0.2037, 0.1709, 0.1606, 0.1530, 0.1474, 0.1433, 0.1384, 0.1361, 0.1353, 0.1351,
        0.1354, 0.1369,
    ],
];

/// Best Hagan fit of [`MARKET_VOLS`], evaluated at the same strikes.
pub const HAGAN_VOLS: [[f64; 13]; 3] = [
    [
        0.5112, 0.4264, 0.3076, 0.2625, 0.2241, 0.1922, 0.1690, 0.1611, 0.1825, 0.2063, 0.2277,
        0.2465, 0.2907,
    ],
    [
        0.2778, 0.2422, 0.1970, 0.1819, 0.1703, 0.1616, 0.1554, 0.1487, 0.1472, 0.1485, 0.1510,
        0.1540, 0.1630,
    ],
    [
        0.2307, 0.2033, 0.1707, 0.1606, 0.1531, 0.1475, 0.1435, 0.1384, 0.1360, 0.1351, 0.1350,
        0.1353, 0.1372,
    ],
];
