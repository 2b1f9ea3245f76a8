"""Live service: OSC over UDP in, WebSocket UI clients in/out.

One asyncio loop owns the engine; the UDP listener and every UI
connection funnel into it, so engine state is never touched from two
contexts at once.  Each sound command and state change is fanned out to
all connected UI clients as one JSON object per WebSocket message.
"""

from __future__ import annotations

import asyncio
import json
import sys
import time

from websockets.asyncio.server import serve as ws_serve

from .engine import Engine
from .osc import OscDecodeError, decode_message

DEFAULT_UDP_PORT = 9000
DEFAULT_WS_PORT = 8080


class PadServer:
    def __init__(self, engine: Engine, udp_port: int = DEFAULT_UDP_PORT,
                 ws_port: int = DEFAULT_WS_PORT, host: str = "127.0.0.1"):
        self.engine = engine
        self.udp_port = udp_port
        self.ws_port = ws_port
        self.host = host
        self.clients: set = set()
        self._t0 = time.monotonic()
        self._stop = asyncio.Event()
        self.ready = asyncio.Event()  # set once both sockets are bound

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def stop(self) -> None:
        self._stop.set()

    def _broadcast(self, obj: dict) -> None:
        data = json.dumps(obj)
        for client in list(self.clients):
            asyncio.ensure_future(self._send(client, data))

    @staticmethod
    async def _send(client, data: str) -> None:
        try:
            await client.send(data)
        except Exception:
            pass  # disconnects are tolerated; cleanup happens in the handler

    def _state_message(self) -> dict:
        return {
            "type": "state",
            "mode": self.engine.mode,
            "masterGain": self.engine.master_gain,
        }

    def _emit_command(self, cmd) -> None:
        msg = {
            "type": "sound",
            "pad": cmd.pad,
            "soundId": cmd.sound_id,
            "gain": cmd.gain,
            "tMs": cmd.t_ms,
        }
        if cmd.pitch is not None:
            msg["pitch"] = cmd.pitch
        self._broadcast(msg)

    # --- UDP (firmware / hardware) ---

    def datagram_received(self, data: bytes) -> None:
        try:
            msg = decode_message(data)
        except OscDecodeError:
            return
        gain_before = self.engine.master_gain
        for cmd in self.engine.ingest(msg, self.now_ms()):
            self._emit_command(cmd)
        if self.engine.master_gain != gain_before:
            self._broadcast(self._state_message())

    # --- WebSocket (UI clients) ---

    async def _handle_client(self, websocket) -> None:
        self.clients.add(websocket)
        try:
            await websocket.send(json.dumps(self._state_message()))
            async for raw in websocket:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    continue
                self._handle_ui_message(msg)
        except Exception:
            pass
        finally:
            self.clients.discard(websocket)

    def _handle_ui_message(self, msg: dict) -> None:
        mtype = msg.get("type")
        t = self.now_ms()
        if mtype == "press":
            pad = msg.get("pad")
            if isinstance(pad, int) and 1 <= pad <= 12:
                cmd = self.engine.press(pad, t)
                if cmd is not None:
                    self._emit_command(cmd)
        elif mtype == "release":
            pad = msg.get("pad")
            if isinstance(pad, int) and 1 <= pad <= 12:
                self.engine.release(pad, t)
        elif mtype == "mode":
            mode = msg.get("mode")
            if mode in ("cartoon", "animal", "generative"):
                self.engine.set_mode(mode, t)
                self._broadcast(self._state_message())

    async def run(self, announce=True) -> None:
        loop = asyncio.get_running_loop()
        server = self

        class UdpProtocol(asyncio.DatagramProtocol):
            def datagram_received(self, data, addr):
                server.datagram_received(data)

        transport, _ = await loop.create_datagram_endpoint(
            UdpProtocol, local_addr=(self.host, self.udp_port)
        )
        self.udp_port = transport.get_extra_info("sockname")[1]
        try:
            async with ws_serve(self._handle_client, self.host, self.ws_port) as ws_server:
                self.ws_port = ws_server.sockets[0].getsockname()[1]
                self.ready.set()
                if announce:
                    print(
                        json.dumps(
                            {
                                "event": "listening",
                                "udpPort": self.udp_port,
                                "wsPort": self.ws_port,
                            }
                        ),
                        flush=True,
                    )
                await self._stop.wait()
        finally:
            transport.close()


async def run_server(engine: Engine, udp_port: int, ws_port: int,
                     host: str = "127.0.0.1", install_signals: bool = True) -> None:
    server = PadServer(engine, udp_port=udp_port, ws_port=ws_port, host=host)
    if install_signals:
        import signal

        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, server.stop)
            except NotImplementedError:
                pass
    await server.run()
    print("session closed", file=sys.stderr)
