# Copyright 2026 The HFI Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds the tiny committed ONNX fixtures and their golden values.

  tiny-vae-<sha8>.onnx           round-trip graph, [-1,1] in and out
  tiny-vae-enc-<sha8>.onnx       encoder emitting latent moments
  tiny-vae-dec-<sha8>.onnx       decoder
  tiny-lpips-<sha8>.onnx         VGG-topology backbone, widths 4..32,
                                 with lpips.lin{j} heads and metadata
  img{0,1}.png, img0_blur.png    fixture images (32x32 RGB)
  rgba.png, img0.jpg,
  img0_progressive.jpg           codec fixtures
  recon{0,1}.bin                 reference reconstructions, float32 CHW
  registry.json, golden.json

Weights are seeded, so re-running produces byte-identical files. Reference
numbers come from diffusers (reconstructions) and the lpips package's own
forward pass (distances), and every exported graph is checked against
onnxruntime before anything is written.

  python3 make_fixtures.py [--out DIR] [--full-vgg PATH]

--full-vgg additionally writes an LPIPS asset with the real VGG16 topology
and the published linear heads (backbone weights are random unless the
torchvision checkpoint is cached). It is large and is not committed; point
HFI_LPIPS_ASSET at it to run the gated channel-count test.
"""

import argparse
import hashlib
import io
import json
import os
from collections import namedtuple

import numpy as np
import onnx
import onnxruntime as ort
import torch
from PIL import Image

import diffusers
import lpips

SIDE = 32
SEED = 20260101
LPIPS_WIDTHS = (4, 8, 16, 32, 32)
SHIFT = (-0.030, -0.088, -0.188)
SCALE = (0.458, 0.448, 0.450)
EPS = 1e-10
OPSET = 17


def sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def export(module, args, input_names, output_names):
    buf = io.BytesIO()
    torch.onnx.export(module, args, buf, opset_version=OPSET, input_names=input_names,
                      output_names=output_names, do_constant_folding=True, dynamo=False)
    return onnx.load_from_string(buf.getvalue())


def save_named(model, out, stem):
    data = model.SerializeToString()
    digest = hashlib.sha256(data).hexdigest()
    name = f"{stem}-{digest[:8]}.onnx"
    with open(os.path.join(out, name), "wb") as f:
        f.write(data)
    return name, digest


def texture(rng, side):
    y, x = np.mgrid[0:side, 0:side].astype(np.float64)
    img = np.empty((3, side, side))
    for c in range(3):
        v = rng.uniform(0.3, 0.7) * np.ones((side, side))
        for _ in range(4):
            f = np.exp(rng.uniform(np.log(0.02), np.log(0.4)))
            th = rng.uniform(0, np.pi)
            v += rng.uniform(0.03, 0.15) * np.sin(
                2 * np.pi * f * (np.cos(th) * x + np.sin(th) * y) + rng.uniform(0, 2 * np.pi))
        img[c] = v
    img += rng.normal(0, 0.02, img.shape)
    return np.clip(img, 0, 1)


def to_png(img, path):
    q = np.round(np.clip(img, 0, 1) * 255).astype(np.uint8).transpose(1, 2, 0)
    Image.fromarray(q, "RGB").save(path, optimize=False)
    return np.asarray(Image.open(path), dtype=np.float64).transpose(2, 0, 1) / 255.0


def gaussian_blur(img, k=3, sigma=0.8):
    r = k // 2
    w = np.exp(-np.arange(-r, r + 1) ** 2 / (2 * sigma * sigma))
    w /= w.sum()
    out = img.copy()
    for axis in (1, 2):
        pad = [(0, 0)] * 3
        pad[axis] = (r, r)
        p = np.pad(out, pad, mode="reflect")
        acc = np.zeros_like(out)
        for i, wi in enumerate(w):
            sl = [slice(None)] * 3
            sl[axis] = slice(i, i + out.shape[axis])
            acc += wi * p[tuple(sl)]
        out = acc
    return out


def codec_fixtures(out):
    rgba = np.array([[[255, 0, 0, 255], [0, 255, 0, 128]],
                     [[0, 0, 255, 0], [255, 255, 255, 64]]], dtype=np.uint8)
    Image.fromarray(rgba, "RGBA").save(os.path.join(out, "rgba.png"), optimize=False)
    src = Image.open(os.path.join(out, "img0.png"))
    src.save(os.path.join(out, "img0.jpg"), quality=90)
    src.save(os.path.join(out, "img0_progressive.jpg"), quality=90, progressive=True)


# ---- autoencoder -----------------------------------------------------------

def tiny_vae():
    torch.manual_seed(SEED)
    vae = diffusers.AutoencoderKL(
        in_channels=3, out_channels=3,
        down_block_types=("DownEncoderBlock2D",) * 3,
        up_block_types=("UpDecoderBlock2D",) * 3,
        block_out_channels=(8, 16, 16), layers_per_block=1,
        latent_channels=4, norm_num_groups=4, sample_size=SIDE)
    # Random init leaves the decoder near-constant; widen the weights a bit
    # so reconstructions carry structure.
    with torch.no_grad():
        for p in vae.parameters():
            if p.dim() == 4:
                p.mul_(1.5)
    return vae.eval()


class RoundTrip(torch.nn.Module):
    def __init__(self, vae):
        super().__init__()
        self.vae = vae

    def forward(self, x):
        return self.vae.decode(self.vae.encode(x).latent_dist.mean).sample


class Moments(torch.nn.Module):
    def __init__(self, vae):
        super().__init__()
        self.vae = vae

    def forward(self, x):
        return self.vae.quant_conv(self.vae.encoder(x))


class Decoder(torch.nn.Module):
    def __init__(self, vae):
        super().__init__()
        self.vae = vae

    def forward(self, z):
        return self.vae.decoder(self.vae.post_quant_conv(z))


# ---- lpips -----------------------------------------------------------------

Stages = namedtuple("Stages", ["relu1_2", "relu2_2", "relu3_3", "relu4_3", "relu5_3"])


class TinyVgg(torch.nn.Module):
    """VGG16 layout (2,2,3,3,3 convs per stage, max-pool between stages)
    with narrow widths."""

    def __init__(self, widths):
        super().__init__()
        convs = (2, 2, 3, 3, 3)
        self.stages = torch.nn.ModuleList()
        cin = 3
        for j, (w, n) in enumerate(zip(widths, convs)):
            layers = [torch.nn.MaxPool2d(2, 2)] if j > 0 else []
            for _ in range(n):
                conv = torch.nn.Conv2d(cin, w, 3, padding=1)
                # He init keeps activations alive through all five stages.
                torch.nn.init.kaiming_normal_(conv.weight, nonlinearity="relu")
                torch.nn.init.uniform_(conv.bias, -0.1, 0.1)
                layers += [conv, torch.nn.ReLU()]
                cin = w
            self.stages.append(torch.nn.Sequential(*layers))

    def forward(self, x):
        outs = []
        for s in self.stages:
            x = s(x)
            outs.append(x)
        return Stages(*outs)


class Backbone(torch.nn.Module):
    def __init__(self, net):
        super().__init__()
        self.net = net

    def forward(self, x):
        return tuple(self.net(x))


def lpips_model(net, chns, lin_seed):
    m = lpips.LPIPS(net="vgg", pretrained=False, pnet_rand=True, verbose=False)
    m.net = net
    m.chns = list(chns)
    m.L = len(chns)
    torch.manual_seed(lin_seed)
    m.lins = torch.nn.ModuleList([lpips.NetLinLayer(c, use_dropout=False) for c in chns])
    with torch.no_grad():
        for lin in m.lins:
            lin.model[-1].weight.uniform_(0.0, 1.0)  # published heads are nonnegative
    return m.eval()


def attach_lpips_contract(model, lins):
    for j, lin in enumerate(lins):
        w = lin.model[-1].weight.detach().numpy().astype(np.float32)
        model.graph.initializer.append(onnx.numpy_helper.from_array(w, f"lpips.lin{j}"))
    for key, value in (("lpips.shift", ",".join(f"{v:g}" for v in SHIFT)),
                       ("lpips.scale", ",".join(f"{v:g}" for v in SCALE)),
                       ("lpips.eps", f"{EPS:g}")):
        entry = model.metadata_props.add()
        entry.key = key
        entry.value = value
    return model


def scaled_input(img):
    x = 2.0 * img - 1.0
    x = (x - np.array(SHIFT)[:, None, None]) / np.array(SCALE)[:, None, None]
    return x[None].astype(np.float32)


def check_graph(model, feeds, expected, what, tol=1e-4):
    sess = ort.InferenceSession(model.SerializeToString(), providers=["CPUExecutionProvider"])
    got = sess.run(None, feeds)
    for g, e in zip(got, expected):
        err = float(np.max(np.abs(g - e)))
        if err > tol:
            raise SystemExit(f"{what}: exported graph diverges by {err:g}")
    return got


def build(out):
    os.makedirs(out, exist_ok=True)
    rng = np.random.default_rng(SEED)
    img0 = to_png(texture(rng, SIDE), os.path.join(out, "img0.png"))
    img1 = to_png(texture(rng, SIDE), os.path.join(out, "img1.png"))
    blur0 = to_png(gaussian_blur(img0), os.path.join(out, "img0_blur.png"))
    images = {"img0.png": img0, "img1.png": img1, "img0_blur.png": blur0}

    codec_fixtures(out)
    golden = {"images": {k: sha256(os.path.join(out, k)) for k in images}}

    # Autoencoder.
    vae = tiny_vae()
    rt = RoundTrip(vae).eval()
    x = torch.zeros(1, 3, SIDE, SIDE)
    rt_onnx = export(rt, (x,), ["x"], ["y"])
    enc_onnx = export(Moments(vae).eval(), (x,), ["x"], ["moments"])
    z = torch.zeros(1, 4, SIDE // 4, SIDE // 4)
    dec_onnx = export(Decoder(vae).eval(), (z,), ["z"], ["y"])
    recons = []
    for i, name in enumerate(("img0.png", "img1.png")):
        xin = torch.from_numpy((2 * images[name] - 1)[None].astype(np.float32))
        with torch.no_grad():
            ref = rt(xin).numpy()
            moments = Moments(vae)(xin).numpy()
        check_graph(rt_onnx, {"x": xin.numpy()}, [ref], "vae round trip")
        check_graph(enc_onnx, {"x": xin.numpy()}, [moments], "vae encoder")
        check_graph(dec_onnx, {"z": moments[:, :4]}, [ref], "vae decoder")
        recon = np.clip((ref[0] + 1) / 2, 0, 1).astype("<f4")
        path = os.path.join(out, f"recon{i}.bin")
        recon.tofile(path)
        recons.append({"image": name, "file": f"recon{i}.bin", "sha256": sha256(path),
                       "shape": list(recon.shape)})
    vae_name, vae_sha = save_named(rt_onnx, out, "tiny-vae")
    enc_name, enc_sha = save_named(enc_onnx, out, "tiny-vae-enc")
    dec_name, dec_sha = save_named(dec_onnx, out, "tiny-vae-dec")
    golden["vae"] = {"native_side": SIDE, "factor": 4, "reconstructions": recons}

    # LPIPS.
    torch.manual_seed(SEED + 1)
    net = TinyVgg(LPIPS_WIDTHS).eval()
    model = lpips_model(net, LPIPS_WIDTHS, SEED + 2)
    lp_onnx = attach_lpips_contract(
        export(Backbone(net).eval(), (torch.zeros(1, 3, SIDE, SIDE),), ["x"],
               [f"stage{j + 1}" for j in range(5)]), model.lins)
    feats = {}
    for name, img in images.items():
        xin = scaled_input(img)
        with torch.no_grad():
            ref = [t.numpy() for t in net(torch.from_numpy(xin))]
        feats[name] = check_graph(lp_onnx, {"x": xin}, ref, "lpips backbone")
    golden["lpips_stages"] = [
        {"stage": j + 1, "channels": int(f.shape[1]), "height": int(f.shape[2]),
         "width": int(f.shape[3]), "mean": float(f.astype(np.float64).mean())}
        for j, f in enumerate(feats["img0.png"])]
    pairs = []
    for a, b in (("img0.png", "img0.png"), ("img0.png", "img0_blur.png"),
                 ("img0.png", "img1.png")):
        ta = torch.from_numpy(images[a][None].astype(np.float32))
        tb = torch.from_numpy(images[b][None].astype(np.float32))
        with torch.no_grad():
            full, layers = model(ta, tb, retPerLayer=True, normalize=True)
        pairs.append({"x": a, "y": b, "lpips": float(full.item()),
                      "layers": [float(v.item()) for v in layers]})
    golden["lpips_pairs"] = pairs
    lp_name, lp_sha = save_named(lp_onnx, out, "tiny-lpips")

    registry = {
        "reconstructors": [
            {"id": "tiny-vae", "kind": "neural", "native_side": SIDE, "factor": 4,
             "training_corpus": "fixture", "asset": vae_name, "sha256": vae_sha},
            {"id": "tiny-vae-split", "kind": "neural", "native_side": SIDE, "factor": 4,
             "training_corpus": "fixture", "asset": enc_name, "sha256": enc_sha,
             "decoder_asset": dec_name, "decoder_sha256": dec_sha},
            {"id": "classical-aa", "kind": "classical", "native_side": SIDE, "factor": 8,
             "training_corpus": "synthetic", "prefilter": "gaussian:k=3,sigma=0.8",
             "upsample": "bilinear"},
        ],
        "distance_assets": [
            {"id": "tiny-lpips", "kind": "lpips", "asset": lp_name, "sha256": lp_sha},
        ],
    }
    with open(os.path.join(out, "registry.json"), "w") as f:
        json.dump(registry, f, indent=2)
        f.write("\n")
    with open(os.path.join(out, "golden.json"), "w") as f:
        json.dump(golden, f, indent=2)
        f.write("\n")


def full_vgg(path):
    torch.manual_seed(SEED)
    model = lpips.LPIPS(net="vgg", pretrained=True, pnet_rand=True, verbose=False).eval()
    net = model.net
    lp_onnx = attach_lpips_contract(
        export(Backbone(net).eval(), (torch.zeros(1, 3, 64, 64),), ["x"],
               [f"stage{j + 1}" for j in range(5)]), model.lins)
    onnx.save(lp_onnx, path)
    print(path, sha256(path))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.dirname(os.path.abspath(__file__)))
    ap.add_argument("--full-vgg")
    args = ap.parse_args()
    build(args.out)
    if args.full_vgg:
        full_vgg(args.full_vgg)


if __name__ == "__main__":
    main()
