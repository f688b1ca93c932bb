/**
 * DOM wiring: canvas capture, respond button, cherry-pick list of prior
 * responses, overlay rendering, and synchronized playback with an
 * animated cursor. All decision logic lives in the pure modules; this
 * file only moves data between them and the browser.
 */
import { Player, scheduleNotes, timbreForMapping } from "./audio.js";
import { GestureRecorder } from "./capture.js";
import { ServiceError, requestResponse } from "./client.js";
import { CALL_COLOR, RESPONSE_COLOR, drawCommands, toCanvas } from "./render.js";
import { RespondReply, WirePerformance } from "./wire.js";

interface TakenResponse {
  reply: RespondReply;
  label: string;
}

export function startApp(root: Document, baseUrl = ""): void {
  const canvas = root.getElementById("stage") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const respondBtn = root.getElementById("respond") as HTMLButtonElement;
  const playBtn = root.getElementById("play") as HTMLButtonElement;
  const stopBtn = root.getElementById("stop") as HTMLButtonElement;
  const clearBtn = root.getElementById("clear") as HTMLButtonElement;
  const takes = root.getElementById("takes") as HTMLSelectElement;
  const errorBox = root.getElementById("error") as HTMLElement;
  const muteCall = root.getElementById("mute-call") as HTMLInputElement;
  const muteResponse = root.getElementById("mute-response") as HTMLInputElement;

  const recorder = new GestureRecorder();
  const responses: TakenResponse[] = [];
  let call: WirePerformance | null = null;
  let player: Player | null = null;
  let cursorFrame = 0;

  const selectedResponse = (): RespondReply | null =>
    responses[takes.selectedIndex]?.reply ?? null;

  function redraw(cursor?: { t: number }): void {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const reply = selectedResponse();
    for (const cmd of drawCommands(call, reply?.response ?? null, canvas.width, canvas.height)) {
      ctx.strokeStyle = ctx.fillStyle = cmd.color;
      ctx.lineWidth = 3;
      const first = cmd.points[0]!;
      if (cmd.points.length === 1) {
        ctx.beginPath();
        ctx.arc(first.x, first.y, 4, 0, 2 * Math.PI);
        ctx.fill();
      } else {
        ctx.beginPath();
        ctx.moveTo(first.x, first.y);
        for (const p of cmd.points.slice(1)) ctx.lineTo(p.x, p.y);
        ctx.stroke();
      }
    }
    if (cursor && call) {
      for (const [perf, color] of [
        [call, CALL_COLOR],
        [reply?.response ?? null, RESPONSE_COLOR],
      ] as const) {
        if (!perf) continue;
        const current = [...perf.events].reverse().find((ev) => ev.t <= cursor.t);
        if (current) {
          const p = toCanvas(current, canvas.width, canvas.height);
          ctx.strokeStyle = color;
          ctx.beginPath();
          ctx.arc(p.x, p.y, 9, 0, 2 * Math.PI);
          ctx.stroke();
        }
      }
    }
  }

  function sync(): void {
    respondBtn.disabled = recorder.isEmpty && call === null;
    playBtn.disabled = call === null;
    errorBox.textContent = "";
    redraw();
  }

  const norm = (e: PointerEvent) => {
    const rect = canvas.getBoundingClientRect();
    return {
      x: (e.clientX - rect.left) / rect.width,
      y: (e.clientY - rect.top) / rect.height,
    };
  };

  let pointerIsDown = false;
  canvas.addEventListener("pointerdown", (e) => {
    pointerIsDown = true;
    const { x, y } = norm(e);
    recorder.pointerDown(x, y, e.timeStamp);
    call = recorder.toWire();
    sync();
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!pointerIsDown) return;
    const { x, y } = norm(e);
    recorder.pointerMove(x, y, e.timeStamp);
    call = recorder.toWire();
    sync();
  });
  const up = () => {
    pointerIsDown = false;
  };
  canvas.addEventListener("pointerup", up);
  canvas.addEventListener("pointerleave", up);

  clearBtn.addEventListener("click", () => {
    recorder.reset();
    call = null;
    responses.length = 0;
    takes.replaceChildren();
    sync();
  });

  respondBtn.addEventListener("click", async () => {
    if (!call) return;
    respondBtn.disabled = true;
    try {
      const current = selectedResponse()?.mapping;
      const reply = await requestResponse(baseUrl, call, { currentMapping: current });
      responses.push({ reply, label: `take ${responses.length + 1} (${reply.mapping})` });
      const opt = root.createElement("option");
      opt.textContent = responses[responses.length - 1]!.label;
      takes.append(opt);
      takes.selectedIndex = responses.length - 1; // newest take selected; older ones stay pickable
    } catch (err) {
      // the captured gesture is preserved; only the error line changes
      errorBox.textContent =
        err instanceof ServiceError ? `service error: ${err.message}` : String(err);
    }
    sync();
  });
  takes.addEventListener("change", () => redraw());

  playBtn.addEventListener("click", () => {
    if (!call) return;
    player = player ?? new Player();
    const startTime = player.now + 0.1;
    if (!muteCall.checked) {
      player.play(scheduleNotes(call, startTime, "sine"));
    }
    const reply = selectedResponse();
    if (reply && !muteResponse.checked) {
      player.play(scheduleNotes(reply.response, startTime, timbreForMapping(reply.mapping)));
    }
    const animate = () => {
      const t = player!.now - startTime;
      redraw({ t });
      if (t < 5.0) cursorFrame = requestAnimationFrame(animate);
      else redraw();
    };
    cursorFrame = requestAnimationFrame(animate);
  });

  stopBtn.addEventListener("click", () => {
    cancelAnimationFrame(cursorFrame);
    redraw(); // cursor reset
  });

  sync();
}
