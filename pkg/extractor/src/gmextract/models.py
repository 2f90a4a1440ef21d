"""Extractor registry: model construction, preprocessing constants, taps.

Embedding tap points are not standardized across tools, so each entry records
its exact tap in the metadata label rather than leaving it implicit:

- inceptionv3: 2048-d global-average-pooled features (the layer feeding the
  classifier), ImageNet normalization, 299 input.
- clip: ViT-B/32 vision tower, 512-d projected image embedding, CLIP
  normalization, 224 input.
- dinov2: ViT-B/14 with 4 register tokens, 768-d pooled CLS token, ImageNet
  normalization, 224 input.
- arcface: ResNet100-style face backbone, 512-d embedding head, (x-.5)/.5
  normalization, 112 input.

Weight modes: "pretrained" downloads/loads published weights (network or
cache required), "random" is a seeded initialization of the same architecture
for pipeline validation; a state-dict file can be supplied instead. The mode
always lands in the output label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import torch

from .errors import WeightLoadError
from .iresnet import iresnet100

RANDOM_INIT_SEED = 0

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)
_CLIP_MEAN = (0.48145466, 0.4578275, 0.40821073)
_CLIP_STD = (0.26862954, 0.26130258, 0.27577711)


@dataclass(frozen=True)
class ExtractorSpec:
    name: str
    dim: int
    input_size: int
    mean: tuple[float, float, float]
    std: tuple[float, float, float]
    norm_name: str
    tap: str
    build: Callable[[], torch.nn.Module]
    load_pretrained: Callable[[], torch.nn.Module]
    forward: Callable[[torch.nn.Module, torch.Tensor], torch.Tensor]


def _build_inception() -> torch.nn.Module:
    from torchvision.models import inception_v3

    model = inception_v3(weights=None, aux_logits=True, init_weights=True)
    model.fc = torch.nn.Identity()
    return model


def _pretrained_inception() -> torch.nn.Module:
    from torchvision.models import Inception_V3_Weights, inception_v3

    model = inception_v3(weights=Inception_V3_Weights.IMAGENET1K_V1)
    model.fc = torch.nn.Identity()
    return model


def _clip_config():
    from transformers import CLIPVisionConfig

    return CLIPVisionConfig(
        hidden_size=768,
        intermediate_size=3072,
        num_hidden_layers=12,
        num_attention_heads=12,
        image_size=224,
        patch_size=32,
        projection_dim=512,
    )


def _build_clip() -> torch.nn.Module:
    from transformers import CLIPVisionModelWithProjection

    return CLIPVisionModelWithProjection(_clip_config())


def _pretrained_clip() -> torch.nn.Module:
    from transformers import CLIPVisionModelWithProjection

    return CLIPVisionModelWithProjection.from_pretrained(
        "openai/clip-vit-base-patch32"
    )


def _build_dinov2() -> torch.nn.Module:
    from transformers import Dinov2WithRegistersConfig, Dinov2WithRegistersModel

    config = Dinov2WithRegistersConfig(
        hidden_size=768,
        num_hidden_layers=12,
        num_attention_heads=12,
        patch_size=14,
        num_register_tokens=4,
    )
    return Dinov2WithRegistersModel(config)


def _pretrained_dinov2() -> torch.nn.Module:
    from transformers import Dinov2WithRegistersModel

    return Dinov2WithRegistersModel.from_pretrained(
        "facebook/dinov2-with-registers-base"
    )


def _no_pretrained_arcface() -> torch.nn.Module:
    raise WeightLoadError(
        "arcface has no published hub weights; pass --weights-path with a "
        "ResNet100 state dict"
    )


EXTRACTORS: dict[str, ExtractorSpec] = {
    "inceptionv3": ExtractorSpec(
        name="inceptionv3",
        dim=2048,
        input_size=299,
        mean=_IMAGENET_MEAN,
        std=_IMAGENET_STD,
        norm_name="imagenet-norm",
        tap="avgpool-2048",
        build=_build_inception,
        load_pretrained=_pretrained_inception,
        forward=lambda model, batch: model(batch),
    ),
    "clip": ExtractorSpec(
        name="clip",
        dim=512,
        input_size=224,
        mean=_CLIP_MEAN,
        std=_CLIP_STD,
        norm_name="clip-norm",
        tap="vit-b32-image-embed-512",
        build=_build_clip,
        load_pretrained=_pretrained_clip,
        forward=lambda model, batch: model(pixel_values=batch).image_embeds,
    ),
    "dinov2": ExtractorSpec(
        name="dinov2",
        dim=768,
        input_size=224,
        mean=_IMAGENET_MEAN,
        std=_IMAGENET_STD,
        norm_name="imagenet-norm",
        tap="vit-b14-reg4-cls-768",
        build=_build_dinov2,
        load_pretrained=_pretrained_dinov2,
        forward=lambda model, batch: model(pixel_values=batch).pooler_output,
    ),
    "arcface": ExtractorSpec(
        name="arcface",
        dim=512,
        input_size=112,
        mean=(0.5, 0.5, 0.5),
        std=(0.5, 0.5, 0.5),
        norm_name="half-norm",
        tap="iresnet100-embed-512",
        build=lambda: iresnet100(512),
        load_pretrained=_no_pretrained_arcface,
        forward=lambda model, batch: model(batch),
    ),
}


def build_model(
    spec: ExtractorSpec, weights: str = "pretrained", weights_path=None
) -> tuple[torch.nn.Module, str]:
    """Construct the extractor in eval mode; returns (model, weights label)."""
    if weights_path is not None:
        model = spec.build()
        try:
            state = torch.load(weights_path, map_location="cpu", weights_only=True)
            model.load_state_dict(state)
        except Exception as exc:
            raise WeightLoadError(
                f"could not load weights for {spec.name} from {weights_path}: {exc}"
            ) from exc
        desc = f"file:{weights_path}"
    elif weights == "random":
        torch.manual_seed(RANDOM_INIT_SEED)
        model = spec.build()
        desc = f"random-seed{RANDOM_INIT_SEED}"
    elif weights == "pretrained":
        try:
            model = spec.load_pretrained()
        except WeightLoadError:
            raise
        except Exception as exc:
            raise WeightLoadError(
                f"could not fetch pretrained weights for {spec.name}: {exc}"
            ) from exc
        desc = "pretrained"
    else:
        raise ValueError(f"unknown weights mode {weights!r}")
    model.eval()
    return model, desc
