//! Gaussian blur of a point source for every legal kernel size.

use faultsim::inject::inject_blur;
use faultsim::textures::gaussian_kernel;
use faultsim::ImageRgbi;

fn main() -> faultsim::Result<()> {
    let mut img = ImageRgbi::new(41, 41, [0; 4])?;
    img.set(20, 20, [255; 4]);
    for size in (3..=17).step_by(2) {
        let k = gaussian_kernel(size)?;
        let out = inject_blur(&img, size)?;
        println!("size {size:2} sigma {:.3}: peak {:3}", k.sigma(), out.get(20, 20)[3]);
    }
    Ok(())
}
