"""Optimized-DRAG leakage table (generated by scripts/build_leakage_table.py)."""

# (E_C in h*GHz, P(|0> -> |2>))
TABLE = (
    (0.08, 0.015611880908432126),
    (0.1, 0.005527302392456651),
    (0.12, 0.0008339495745054538),
    (0.14, 8.085446680451366e-05),
    (0.16, 0.00012121873876222292),
    (0.18, 7.354635190137402e-05),
    (0.2, 3.425370574115991e-05),
    (0.22, 2.6618712764539503e-05),
    (0.24, 2.05891912107682e-05),
    (0.26, 1.4779913674286115e-05),
    (0.28, 1.1325039810103999e-05),
    (0.3, 8.287324041558493e-06),
    (0.32, 6.1713597270467325e-06),
    (0.34, 5.023216300599111e-06),
    (0.36, 3.960690897690905e-06),
    (0.38, 3.1009388390338256e-06),
    (0.4, 2.5826212450909573e-06),
    (0.42, 2.1170969365329187e-06),
    (0.44, 1.7154764427026208e-06),
    (0.46, 1.456214493537408e-06),
    (0.48, 1.228777823974378e-06),
    (0.5, 1.0221162366424528e-06),
    (0.52, 8.804719535509145e-07),
    (0.54, 7.591327100553406e-07),
    (0.56, 6.447117208386113e-07),
    (0.58, 5.619239681063828e-07),
    (0.6, 4.925124153677383e-07),
)
