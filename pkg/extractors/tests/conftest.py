import numpy as np
import pytest
from PIL import Image, ImageDraw


def textured_image(rng, base_color, size=(96, 96)) -> Image.Image:
    """Structured test image: colored background plus random shapes so SIFT
    has corners to find."""
    img = Image.new("RGB", size, base_color)
    draw = ImageDraw.Draw(img)
    for _ in range(12):
        x0, y0 = rng.integers(0, size[0] - 20, size=2)
        w, h = rng.integers(8, 24, size=2)
        color = tuple(int(c) for c in rng.integers(0, 255, size=3))
        if rng.random() < 0.5:
            draw.rectangle([int(x0), int(y0), int(x0 + w), int(y0 + h)], fill=color)
        else:
            draw.ellipse([int(x0), int(y0), int(x0 + w), int(y0 + h)], fill=color)
    return img


@pytest.fixture(scope="session")
def desk_set(tmp_path_factory):
    """Ten structured images: five greenish 'ground', five bluish 'sky',
    plus a 90-degree rotated copy of the first image."""
    root = tmp_path_factory.mktemp("desk_images")
    rng = np.random.default_rng(7)
    names = []
    for k in range(5):
        img = textured_image(rng, (40, 150 + 10 * k, 30))
        img.save(root / f"ground{k}.png")
        names.append(f"ground{k}")
    for k in range(5):
        img = textured_image(rng, (40, 60, 160 + 10 * k))
        img.save(root / f"sky{k}.png")
        names.append(f"sky{k}")
    with Image.open(root / "ground0.png") as img:
        img.rotate(90).save(root / "rot_ground0.png")
    return root


@pytest.fixture()
def out_dir(tmp_path):
    return tmp_path / "out"
