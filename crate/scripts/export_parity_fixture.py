#!/usr/bin/env python3
"""Export a small DCGAN generator from PyTorch plus recorded forward outputs.

The Rust crate loads the weights and must reproduce the outputs within 1e-4.
Run from the repository root:

    python3 scripts/export_parity_fixture.py crates/core/tests/fixtures
"""

import argparse
import json
import struct
from pathlib import Path

import torch
from torch import nn

LATENT = 5
CHANNELS = 12
WIDTHS = (32, 16, 8)
FORMAT_TAG = "levelgan-generator-weights"
MAGIC = b"LGANWGT\0"


def build(widths):
    w0, w1, w2 = widths
    return nn.Sequential(
        nn.ConvTranspose2d(LATENT, w0, 4, 1, 0, bias=False),
        nn.BatchNorm2d(w0),
        nn.ReLU(True),
        nn.ConvTranspose2d(w0, w1, 4, 2, 1, bias=False),
        nn.BatchNorm2d(w1),
        nn.ReLU(True),
        nn.ConvTranspose2d(w1, w2, 4, 2, 1, bias=False),
        nn.BatchNorm2d(w2),
        nn.ReLU(True),
        nn.ConvTranspose2d(w2, CHANNELS, 4, 2, 1, bias=False),
        nn.Tanh(),
    )


def flat(t):
    return [float(v) for v in t.detach().reshape(-1).tolist()]


def layers_of(net):
    out = []
    for m in net:
        if isinstance(m, nn.ConvTranspose2d):
            layer = {
                "kind": "conv_transpose",
                "in_channels": m.in_channels,
                "out_channels": m.out_channels,
                "kernel": m.kernel_size[0],
                "stride": m.stride[0],
                "padding": m.padding[0],
                "weight": flat(m.weight),
            }
            if m.bias is not None:
                layer["bias"] = flat(m.bias)
            out.append(layer)
        elif isinstance(m, nn.BatchNorm2d):
            out.append({
                "kind": "batch_norm",
                "channels": m.num_features,
                "eps": m.eps,
                "gamma": flat(m.weight),
                "beta": flat(m.bias),
                "running_mean": flat(m.running_mean),
                "running_var": flat(m.running_var),
            })
        elif isinstance(m, nn.ReLU):
            out.append({"kind": "activation", "function": "relu"})
        elif isinstance(m, nn.Tanh):
            out.append({"kind": "activation", "function": "tanh"})
        else:
            raise TypeError(f"unsupported module {m}")
    return out


def document(layers, encoding):
    return {
        "format": FORMAT_TAG,
        "version": 1,
        "encoding": encoding,
        "metadata": {
            "latent_size": LATENT,
            "channels": CHANNELS,
            "canvas": [32, 32],
            "crop": [14, 16],
            "producer": f"torch {torch.__version__}",
        },
        "layers": layers,
    }


def binary(layers):
    blob = []
    header_layers = []
    for layer in layers:
        entry = {}
        for key, value in layer.items():
            if isinstance(value, list):
                entry[key] = {"offset": len(blob), "len": len(value)}
                blob.extend(value)
            else:
                entry[key] = value
        header_layers.append(entry)
    header = json.dumps(document(header_layers, "binary")).encode()
    return MAGIC + struct.pack("<I", len(header)) + header + struct.pack(f"<{len(blob)}f", *blob)


def decode(volume):
    codes = volume[:, :14, :16].argmax(dim=0)
    codes[codes == 6] = 1
    codes[codes == 7] = 0
    codes[codes == 8] = 0
    return codes.tolist()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=20)
    args = ap.parse_args()

    torch.manual_seed(args.seed)
    net = build(WIDTHS)
    with torch.no_grad():
        for m in net:
            if isinstance(m, nn.BatchNorm2d):
                m.weight.uniform_(0.8, 1.2)
                m.bias.uniform_(-0.1, 0.1)
                m.running_mean.uniform_(-0.05, 0.05)
                m.running_var.uniform_(0.5, 1.5)
    net.eval()

    latents = torch.rand(10, LATENT) * 2 - 1
    with torch.no_grad():
        outputs = net(latents.view(10, LATENT, 1, 1))

    args.out.mkdir(parents=True, exist_ok=True)
    layers = layers_of(net)
    (args.out / "parity_weights.json").write_text(json.dumps(document(layers, "text")) + "\n")
    (args.out / "parity_weights.bin").write_bytes(binary(layers))
    (args.out / "parity_outputs.f32le").write_bytes(
        struct.pack(f"<{outputs.numel()}f", *flat(outputs)))
    (args.out / "parity.json").write_text(json.dumps({
        "latents": [[float(v) for v in z] for z in latents.tolist()],
        "output_shape": [CHANNELS, 32, 32],
        "outputs": "parity_outputs.f32le",
        "segments": [decode(o) for o in outputs],
    }) + "\n")


if __name__ == "__main__":
    main()
