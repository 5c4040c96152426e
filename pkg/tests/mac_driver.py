"""Drive a lone Dcf by hand: transmissions always fail (no ACK ever arrives)."""

from dcfsim.mac import Dcf, Drop, Frame, FrameKind, MacParams, Transmit


def failing_station(params=None, attempts=8):
    """Return (cw used at each attempt, drop actions, final Dcf)."""
    params = params or MacParams()
    used = []
    mac = Dcf(0, params, draw=lambda cw: 0)
    now = 0
    acts = mac.enqueue(Frame(FrameKind.DATA, 0, 1, payload_bytes=512), now)
    drops = []
    while len(used) < attempts:
        tx = [a for a in acts if isinstance(a, Transmit)]
        drops += [a for a in acts if isinstance(a, Drop)]
        if tx:
            used.append(mac.cw_current)
            now += tx[0].airtime
            acts = mac.tx_end(now)
            continue
        name, now = min(mac.timers.items(), key=lambda kv: kv[1])
        acts = mac.timer(name, now)
    # let the last timeout fire
    while not drops:
        name, now = min(mac.timers.items(), key=lambda kv: kv[1])
        acts = mac.timer(name, now)
        drops += [a for a in acts if isinstance(a, Drop)]
    return used, drops, mac
