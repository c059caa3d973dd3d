"""Built-in scenarios.

Values stated with the reference experiments are used verbatim: N = 50,
k = 25, c = 0.75, k_max = 20, m = 2, l = 0.75, BER = 1e-3, and the data
channel sets L in {1, 5, 10, 15} (single class) and L1 = L2 in {1, 5, 10}
(QoS). Everything else is an engineering default and is marked ``default``
below: nb = 500 bits, n = 4 attempts, the base load a = 0.5, k = 16 request
slots for 802.11a, k = 16 access codes and L = 8 for CDMA, and which L each
preset starts from (override with ``--set``).
"""

_SINGLE = """\
name = {name}
model = single
params.N = 50
params.k = {k}
# default
params.a = 0.5
params.c = 0.75
# default
params.n = 4
params.L = {L}
error.ber = 0.001
# default
error.nb = 500
sweep.var = a
sweep.start = 0.02
sweep.stop = 1.0
sweep.step = 0.02
sim.frames = 500
sim.replications = 30
sim.seed = 1
"""

_QOS = """\
name = {name}
model = qos
params.N = 50
# default
params.a = 0.5
params.l = 0.75
params.m = 2.0
params.k_max = 20
params.c1 = 0.75
params.c2 = 0.75
# default
params.n = 4
params.L1 = {L}
params.L2 = {L}
error.ber = 0.001
# default
error.nb = 500
sweep.var = a
sweep.start = 0.02
sweep.stop = 1.0
sweep.step = 0.02
sim.frames = 500
sim.replications = 30
sim.seed = 1
"""

PRESETS = {
    "hiperlan2-single": _SINGLE.format(name="hiperlan2-single", k=25, L=10),
    # default k
    "80211a-single": _SINGLE.format(name="80211a-single", k=16, L=1),
    # default k (access codes) and L
    "cdma-single": _SINGLE.format(name="cdma-single", k=16, L=8),
    "paper-qos": _QOS.format(name="paper-qos", L=1),
    "wimax-qos": _QOS.format(name="wimax-qos", L=10),
}
